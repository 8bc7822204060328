"""Sparse multivariate polynomials and rational functions over exact scalars.

A :class:`Poly` lives in a ring with a fixed number of variables and stores a
mapping ``exponent tuple -> nonzero coefficient``.  Terms are printed and
iterated in graded-lexicographic order (highest first), which makes equality,
hashing and output deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from .errors import DivisionByZero, ValidationError
from .field import format_scalar

Exponent = tuple[int, ...]


def _grlex(e: Exponent) -> tuple:
    return (sum(e), e)


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Any] | None = None) -> None:
        self.nvars = nvars
        clean: dict[Exponent, Any] = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars:
                raise ValidationError("exponent length does not match the number of variables")
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, nvars: int, c: Any) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int, c: Any = Fraction(1)) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): c})

    @classmethod
    def monomial(cls, nvars: int, exps: Sequence[int], c: Any = Fraction(1)) -> "Poly":
        return cls(nvars, {tuple(exps): c})

    # -- basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def constant_term(self) -> Any:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def support(self) -> set[int]:
        """Indices of variables that actually occur."""
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def order_in(self, i: int) -> int:
        """Lowest exponent of variable ``i`` among the terms (-1 for zero)."""
        return min((e[i] for e in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[Exponent, Any]]:
        return sorted(self.terms.items(), key=lambda t: _grlex(t[0]), reverse=True)

    def __iter__(self) -> Iterator[tuple[Exponent, Any]]:
        return iter(self.sorted_terms())

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if self.nvars != other.nvars:
            raise ValidationError("polynomials live in different rings", left=self.nvars, right=other.nvars)

    def _lift(self, other: Any) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other: Any) -> "Poly":
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> "Poly":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "Poly":
        return self._lift(other) - self

    def __mul__(self, other: Any) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict[Exponent, Any] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValidationError("negative power of a polynomial")
        out = Poly.const(self.nvars, Fraction(1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        return self == Poly.const(self.nvars, other)

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- calculus and substitution -----------------------------------------
    def derivative(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return Poly(self.nvars, out)

    def coefficients_in(self, i: int) -> dict[int, "Poly"]:
        """Write the polynomial as sum_k c_k * x_i^k; returns {k: c_k} (c_k free of x_i)."""
        out: dict[int, dict] = {}
        for e, c in self.terms.items():
            f = list(e)
            k = f[i]
            f[i] = 0
            out.setdefault(k, {})[tuple(f)] = c
        return {k: Poly(self.nvars, t) for k, t in out.items()}

    def coefficient_in(self, i: int, k: int) -> "Poly":
        return self.coefficients_in(i).get(k, Poly(self.nvars))

    def set_zero(self, i: int) -> "Poly":
        return Poly(self.nvars, {e: c for e, c in self.terms.items() if not e[i]})

    def substitute(self, images: Mapping[int, "Poly"], nvars: int | None = None) -> "Poly":
        """Replace variable i by ``images[i]``; variables absent from ``images``
        are kept (only allowed when the target ring equals this ring)."""
        n = self.nvars if nvars is None else nvars
        one = Poly.const(n, Fraction(1))
        out = Poly(n)
        cache: dict[tuple[int, int], Poly] = {}
        for e, c in self.terms.items():
            term = one * c
            for i, k in enumerate(e):
                if not k:
                    continue
                if i in images:
                    img = images[i]
                else:
                    if n != self.nvars:
                        raise ValidationError("variable without an image", var=i)
                    img = Poly.var(n, i)
                key = (i, k)
                if key not in cache:
                    cache[key] = img ** k
                term = term * cache[key]
            out = out + term
        return out

    def rename(self, mapping: Mapping[int, int], nvars: int) -> "Poly":
        """Move variable i to position ``mapping[i]`` in a ring of ``nvars`` variables."""
        out: dict[Exponent, Any] = {}
        for e, c in self.terms.items():
            f = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    if i not in mapping:
                        raise ValidationError("variable has no target", var=i)
                    f[mapping[i]] += k
            out[tuple(f)] = out.get(tuple(f), 0) + c
        return Poly(nvars, out)

    def evaluate(self, point: Sequence[Any]) -> Any:
        total: Any = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * x ** k
            total = total + t
        return total

    def map_coefficients(self, f: Callable[[Any], Any]) -> "Poly":
        return Poly(self.nvars, {e: f(c) for e, c in self.terms.items()})

    # -- divisibility ---------------------------------------------------------
    def monomial_content(self) -> Exponent:
        """Componentwise minimum exponent: the largest monomial dividing this polynomial."""
        if not self.terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self.terms) for i in range(self.nvars))

    def divide_monomial(self, exps: Sequence[int]) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            f = tuple(a - b for a, b in zip(e, exps))
            if min(f, default=0) < 0:
                raise ValidationError("monomial does not divide the polynomial")
            out[f] = c
        return Poly(self.nvars, out)

    def exact_divide(self, d: "Poly") -> "Poly":
        """Exact division by ``d`` (multivariate long division in grlex order).

        Raises ValidationError when ``d`` does not divide this polynomial.
        """
        self._check(d)
        if not d.terms:
            raise DivisionByZero("division by the zero polynomial")
        lead_e, lead_c = d.sorted_terms()[0]
        rem = self
        quot = Poly(self.nvars)
        while rem.terms:
            e, c = rem.sorted_terms()[0]
            f = tuple(a - b for a, b in zip(e, lead_e))
            if min(f, default=0) < 0:
                raise ValidationError("polynomial is not divisible")
            t = Poly(self.nvars, {f: c / lead_c})
            quot = quot + t
            rem = rem - t * d
        return quot

    def normalized(self) -> "Poly":
        """Scalar multiple with leading (grlex-highest) coefficient 1."""
        if not self.terms:
            return self
        c = self.sorted_terms()[0][1]
        return self * (1 / c) if c != 1 else self

    # -- printing -------------------------------------------------------------
    def format(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names is not None else ["u%d" % i for i in range(self.nvars)]
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(names[i] + ("^%d" % k if k > 1 else "") for i, k in enumerate(e) if k)
            s = format_scalar(c)
            if " " in s:
                s = "(" + s + ")"
            if not mono:
                pieces.append(s)
            elif s == "1":
                pieces.append(mono)
            elif s == "-1":
                pieces.append("-" + mono)
            else:
                pieces.append(s + "*" + mono)
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return "Poly(%s)" % self.format()


def poly_sum(polys: Iterable[Poly], nvars: int) -> Poly:
    out = Poly(nvars)
    for p in polys:
        out = out + p
    return out


def poly_prod(polys: Iterable[Poly], nvars: int) -> Poly:
    out = Poly.const(nvars, Fraction(1))
    for p in polys:
        out = out * p
    return out


class RationalFunction:
    """A quotient ``num / den`` of polynomials; equality is by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None) -> None:
        den = Poly.const(num.nvars, Fraction(1)) if den is None else den
        if not den.terms:
            raise DivisionByZero("rational function with zero denominator")
        num._check(den)
        self.num, self.den = num, den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def _lift(self, other: Any) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction(other)
        return RationalFunction(Poly.const(self.nvars, other))

    def __add__(self, other: Any) -> "RationalFunction":
        o = self._lift(other)
        if o.den == self.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: Any) -> "RationalFunction":
        return self + (-self._lift(other))

    def __mul__(self, other: Any) -> "RationalFunction":
        o = self._lift(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalFunction":
        o = self._lift(other)
        if not o.num.terms:
            raise DivisionByZero("division by the zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __eq__(self, other: Any) -> bool:
        o = self._lift(other)
        return self.num * o.den == o.num * self.den

    def __hash__(self) -> int:  # pragma: no cover - equality is not canonical
        raise TypeError("RationalFunction is unhashable")

    def derivative(self, i: int) -> "RationalFunction":
        return RationalFunction(self.num.derivative(i) * self.den - self.num * self.den.derivative(i), self.den * self.den)

    def set_zero(self, i: int) -> "RationalFunction":
        d = self.den.set_zero(i)
        if not d.terms:
            raise DivisionByZero("denominator vanishes on the divisor")
        return RationalFunction(self.num.set_zero(i), d)

    def simplified(self) -> "RationalFunction":
        """Cancel the common monomial factor and, when possible, the whole denominator."""
        m = tuple(min(a, b) for a, b in zip(self.num.monomial_content(), self.den.monomial_content()))
        num = self.num.divide_monomial(m) if self.num.terms else self.num
        den = self.den.divide_monomial(m)
        if den.is_constant():
            c = den.constant_term()
            return RationalFunction(num * (1 / c), Poly.const(self.nvars, Fraction(1)))
        try:
            q = num.exact_divide(den)
            return RationalFunction(q)
        except ValidationError:
            return RationalFunction(num, den)

    def is_polynomial(self) -> bool:
        return self.simplified().den.is_constant()

    def evaluate(self, point: Sequence[Any]) -> Any:
        d = self.den.evaluate(point)
        if not d:
            raise DivisionByZero("denominator vanishes at the point")
        return self.num.evaluate(point) / d

    def format(self, names: Sequence[str] | None = None) -> str:
        s = self.simplified()
        if s.den == 1:
            return s.num.format(names)
        return "(%s)/(%s)" % (s.num.format(names), s.den.format(names))

    def __repr__(self) -> str:
        return "RationalFunction(%s)" % self.format()


def taylor_coefficient(f: RationalFunction, i: int, k: int) -> RationalFunction:
    """k-th Taylor coefficient in variable i at 0, by the derivative formula.

    f^(m) is kept as p_m / q^(m+1), which avoids squaring the denominator at
    every step: (p / q^(m+1))' = (p' q - (m+1) p q') / q^(m+2).
    """
    p, q = f.num, f.den
    if not q.set_zero(i).terms:
        raise DivisionByZero("function is not regular on the divisor")
    for m in range(k):
        p = p.derivative(i) * q - p * q.derivative(i) * (m + 1)
    q0 = q.set_zero(i)
    return RationalFunction(p.set_zero(i) * Fraction(1, factorial(k)), q0 ** (k + 1))
