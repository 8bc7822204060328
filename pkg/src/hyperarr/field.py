"""Exact scalars: the rationals and cyclotomic fields Q(zeta_q).

Rationals are plain :class:`fractions.Fraction` values.  Elements of
``Q(zeta_q)`` are :class:`Cyclotomic` instances storing the order ``q`` and a
coefficient vector of length ``phi(q)`` -- the unique representative of the
residue class modulo the ``q``-th cyclotomic polynomial.  Rationals promote
into any cyclotomic field; two different orders never mix.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Sequence, Union

from .errors import DivisionByZero, FieldMismatch, ValidationError

Scalar = Union[Fraction, "Cyclotomic"]


# ---------------------------------------------------------------------------
# integer / rational polynomial helpers (coefficient lists, low degree first)
# ---------------------------------------------------------------------------
def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a: Sequence, b: Sequence) -> tuple[list, list]:
    a = [Fraction(x) for x in a]
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise DivisionByZero("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    lead = b[-1]
    for shift in range(len(a) - len(b), -1, -1):
        c = r[shift + len(b) - 1] / lead
        q[shift] = c
        if c:
            for i, bc in enumerate(b):
                r[shift + i] -= c * bc
    return _trim(q), _trim(r[: len(b) - 1])


def _poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_sub(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(q: int) -> tuple[int, ...]:
    """Coefficients (lowest degree first) of the q-th cyclotomic polynomial.

    Computed as (x^q - 1) divided by the product of Phi_d over proper divisors d.
    """
    if q < 1:
        raise ValidationError("cyclotomic order must be positive", order=q)
    num = [Fraction(-1)] + [Fraction(0)] * (q - 1) + [Fraction(1)]
    for d in range(1, q):
        if q % d == 0:
            num, rem = _poly_divmod(num, cyclotomic_polynomial(d))
            assert not rem
    return tuple(int(c) for c in num)


def euler_phi(q: int) -> int:
    return len(cyclotomic_polynomial(q)) - 1


# ---------------------------------------------------------------------------
# Cyclotomic elements
# ---------------------------------------------------------------------------
class Cyclotomic:
    """An element of Q(zeta_q), stored as a residue modulo Phi_q."""

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs: Iterable[Any] = ()) -> None:
        modulus = cyclotomic_polynomial(order)
        deg = len(modulus) - 1
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > deg:
            _, cs = _poly_divmod(cs, modulus)
        cs = list(cs) + [Fraction(0)] * (deg - len(cs))
        self.order = order
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash: int | None = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "Cyclotomic":
        """zeta_q ** power (negative powers allowed)."""
        power %= order
        return cls(order, [0] * power + [1])

    @classmethod
    def from_rational(cls, order: int, value: Any) -> "Cyclotomic":
        return cls(order, [Fraction(value)])

    # predicates -----------------------------------------------------------
    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def __bool__(self) -> bool:
        return any(self.coeffs)

    # coercion -------------------------------------------------------------
    def _coerce(self, other: Any) -> "Cyclotomic | None":
        if isinstance(other, Cyclotomic):
            if other.order != self.order:
                raise FieldMismatch(
                    "cannot combine elements of different cyclotomic fields",
                    left=self.order,
                    right=other.order,
                )
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [other])
        return None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other: Any) -> "Cyclotomic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic(self.order, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.order, [-a for a in self.coeffs])

    def __sub__(self, other: Any) -> "Cyclotomic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic(self.order, [a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other: Any) -> "Cyclotomic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [a * other for a in self.coeffs])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Cyclotomic(self.order, _poly_mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if not self:
            raise DivisionByZero("inverse of zero in Q(zeta_%d)" % self.order)
        # extended Euclid in Q[x]: find s with s * a == 1 mod Phi_q
        r0, r1 = [Fraction(c) for c in cyclotomic_polynomial(self.order)], _trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        c = r1[0]
        return Cyclotomic(self.order, [x / c for x in s1])

    def __truediv__(self, other: Any) -> "Cyclotomic":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return Cyclotomic(self.order, [a / other for a in self.coeffs])
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Any) -> "Cyclotomic":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int) -> "Cyclotomic":
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyclotomic(self.order, [1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison / hashing -------------------------------------------------
    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Cyclotomic):
            return self.order == other.order and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.coeffs[0])
            else:
                self._hash = hash((self.order, self.coeffs))
        return self._hash

    def __repr__(self) -> str:
        return "Cyclotomic(%d, %s)" % (self.order, [str(c) for c in self.coeffs])

    def __str__(self) -> str:
        return format_scalar(self)

    def __complex__(self) -> complex:
        z = cmath.exp(2j * math.pi / self.order)
        return sum((complex(float(c)) * z**k for k, c in enumerate(self.coeffs)), 0j)


# ---------------------------------------------------------------------------
# Field descriptors
# ---------------------------------------------------------------------------
class Field:
    """Descriptor of the scalar field: ``Field(None)`` is Q, ``Field(q)`` is Q(zeta_q)."""

    __slots__ = ("order",)

    def __init__(self, order: int | None = None) -> None:
        if order is not None and order < 1:
            raise ValidationError("cyclotomic order must be positive", order=order)
        self.order = order

    @property
    def is_rational(self) -> bool:
        return self.order is None

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, Field) and other.order == self.order

    def __hash__(self) -> int:
        return hash(("Field", self.order))

    def __repr__(self) -> str:
        return "Field(Q)" if self.order is None else "Field(Q(zeta_%d))" % self.order

    def __call__(self, value: Any) -> Scalar:
        """Coerce ``value`` (int, Fraction, string "p/q", Cyclotomic) into this field."""
        if isinstance(value, Cyclotomic):
            if self.order is None:
                if value.is_rational():
                    return value.coeffs[0]
                raise FieldMismatch("cyclotomic value in rational field", order=value.order)
            if value.order != self.order:
                raise FieldMismatch("cyclotomic order mismatch", expected=self.order, got=value.order)
            return value
        if isinstance(value, float):
            raise ValidationError("floats are not exact scalars", value=value)
        frac = Fraction(value)
        return frac if self.order is None else Cyclotomic(self.order, [frac])

    def zero(self) -> Scalar:
        return self(0)

    def one(self) -> Scalar:
        return self(1)

    def zeta(self, power: int = 1) -> Scalar:
        if self.order is None:
            raise FieldMismatch("Q has no distinguished root of unity")
        return Cyclotomic.zeta(self.order, power)

    def to_json(self) -> dict[str, Any]:
        if self.order is None:
            return {"type": "rational"}
        return {"type": "cyclotomic", "order": self.order}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Field":
        kind = data.get("type")
        if kind == "rational":
            return cls(None)
        if kind == "cyclotomic":
            return cls(int(data["order"]))
        raise ValidationError("unknown field type", field=data)


QQ = Field(None)


def field_of(x: Any) -> Field:
    return Field(x.order) if isinstance(x, Cyclotomic) else QQ


def common_field(a: Any, b: Any) -> Field:
    fa, fb = field_of(a), field_of(b)
    if fa.is_rational:
        return fb
    if fb.is_rational or fa == fb:
        return fa
    raise FieldMismatch("operands live in different cyclotomic fields", left=fa.order, right=fb.order)


def field_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    """Exact ``a op b`` for ``op`` in add/sub/mul/div, with implicit Q -> Q(zeta_q) promotion."""
    common_field(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise DivisionByZero("division by zero")
        return a / b
    raise ValidationError("unknown operation", op=op)


def embed_numeric(a: Any) -> complex:
    """Complex value of an exact scalar, with zeta_q -> exp(2 pi i / q)."""
    if isinstance(a, Cyclotomic):
        return complex(a)
    return complex(float(Fraction(a)))


def is_zero(a: Any) -> bool:
    return not a


def scalar_key(a: Any) -> tuple:
    """Total-order key used for deterministic sorting of exact scalars."""
    cs = list(a.coeffs) if isinstance(a, Cyclotomic) else [Fraction(a)]
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(cs)


# ---------------------------------------------------------------------------
# text / JSON encoding
# ---------------------------------------------------------------------------
def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def format_scalar(a: Any) -> str:
    """Canonical human-readable string, e.g. ``1/2`` or ``1 - 2*z4^1`` for cyclotomics."""
    if not isinstance(a, Cyclotomic):
        return format_rational(Fraction(a))
    if a.is_rational():
        return format_rational(a.coeffs[0])
    parts = []
    for k, c in enumerate(a.coeffs):
        if c == 0:
            continue
        mag = format_rational(abs(c))
        if k == 0:
            term = mag
        elif abs(c) == 1:
            term = "z%d^%d" % (a.order, k)
        else:
            term = "%s*z%d^%d" % (mag, a.order, k)
        sign = "-" if c < 0 else "+"
        parts.append((sign, term))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, term in parts[1:]:
        out += " %s %s" % (sign, term)
    return out


def scalar_to_json(a: Any) -> Any:
    if isinstance(a, Cyclotomic):
        return {"order": a.order, "coeffs": [format_rational(c) for c in a.coeffs]}
    return format_rational(Fraction(a))


def scalar_from_json(data: Any, field: Field = QQ) -> Scalar:
    if isinstance(data, dict):
        val = Cyclotomic(int(data["order"]), [Fraction(c) for c in data["coeffs"]])
        return field(val)
    if isinstance(data, float):
        raise ValidationError("floats are not exact scalars; use strings like \"1/3\"", value=data)
    try:
        return field(Fraction(data))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError("cannot parse scalar", value=data) from exc
