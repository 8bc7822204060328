"""Arrangements of lines in V*, subspaces (flats) and the basic constructions.

An arrangement is a finite list of pairwise non-proportional nonzero covectors,
each scaled so that its first nonzero entry is 1.  Subspaces of V* are stored
as :class:`Flat` objects in canonical reduced row echelon form.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from . import linalg
from .errors import (
    BadParams,
    DuplicateHyperplane,
    FieldMismatch,
    UnknownBuiltin,
    ValidationError,
    ZeroCovector,
)
from .field import QQ, Cyclotomic, Field, format_scalar, scalar_from_json, scalar_key, scalar_to_json

Vector = tuple


def canonical_covector(v: Sequence[Any]) -> Vector:
    """Scale ``v`` so that its first nonzero entry equals 1."""
    lead = next((x for x in v if x != 0), None)
    if lead is None:
        raise ZeroCovector("covector is zero", covector=[format_scalar(x) for x in v])
    if lead == 1:
        return tuple(v)
    inv = 1 / lead
    return tuple(x * inv for x in v)


def format_vector(v: Sequence[Any], names: Sequence[str] | None = None) -> str:
    """Linear-form notation, e.g. ``x1 + x2 - x3``."""
    n = len(v)
    if names is None:
        names = ["x%d" % (i + 1) for i in range(n)]
    terms = []
    for c, name in zip(v, names):
        if c == 0:
            continue
        s = format_scalar(c)
        if s == "1":
            terms.append(("+", name))
        elif s == "-1":
            terms.append(("-", name))
        elif " " in s:
            terms.append(("+", "(%s)*%s" % (s, name)))
        elif s.startswith("-"):
            terms.append(("-", "%s*%s" % (s[1:], name)))
        else:
            terms.append(("+", "%s*%s" % (s, name)))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sgn, t in terms[1:]:
        out += " %s %s" % (sgn, t)
    return out


class Flat:
    """A subspace of V* in canonical reduced row echelon form."""

    __slots__ = ("ambient", "rows", "pivots", "_key", "_hash")

    def __init__(self, ambient: int, vectors: Iterable[Sequence[Any]] = ()) -> None:
        vecs = [list(v) for v in vectors]
        for v in vecs:
            if len(v) != ambient:
                raise ValidationError("vector length does not match ambient dimension", ambient=ambient)
        red, piv = linalg.rref(vecs, ambient) if vecs else ([], [])
        self.ambient = ambient
        self.rows: tuple[tuple, ...] = tuple(tuple(r) for r in red)
        self.pivots: tuple[int, ...] = tuple(piv)
        self._key: tuple | None = None
        self._hash: int | None = None

    @classmethod
    def zero(cls, ambient: int) -> "Flat":
        return cls(ambient, [])

    @classmethod
    def full(cls, ambient: int, one: Any = Fraction(1)) -> "Flat":
        zero = one - one
        return cls(ambient, [[one if i == j else zero for j in range(ambient)] for i in range(ambient)])

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def codim(self) -> int:
        return self.ambient - len(self.rows)

    def key(self) -> tuple:
        if self._key is None:
            self._key = (self.dim, tuple(tuple(scalar_key(x) for x in r) for r in self.rows))
        return self._key

    def __eq__(self, other: Any) -> bool:
        return isinstance(other, Flat) and self.ambient == other.ambient and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ambient, self.rows))
        return self._hash

    def __lt__(self, other: "Flat") -> bool:
        return self.key() < other.key()

    def __repr__(self) -> str:
        return "Flat(%s)" % self.describe()

    def describe(self) -> str:
        if not self.rows:
            return "0"
        return "<" + ", ".join(format_vector(r) for r in self.rows) + ">"

    def to_json(self) -> list:
        return [[scalar_to_json(x) for x in r] for r in self.rows]

    # -- membership and coordinates ---------------------------------------
    def reduce(self, v: Sequence[Any]) -> list:
        """Remainder of ``v`` after eliminating the pivot columns of this flat."""
        w = list(v)
        for r, p in zip(self.rows, self.pivots):
            c = w[p]
            if c != 0:
                w = [a - c * b for a, b in zip(w, r)]
        return w

    def contains_vector(self, v: Sequence[Any]) -> bool:
        return all(x == 0 for x in self.reduce(v))

    def coordinates(self, v: Sequence[Any]) -> list:
        """Coordinates of ``v`` (assumed in this flat) in the echelon basis."""
        return [v[p] for p in self.pivots]

    def quotient_coordinates(self, v: Sequence[Any]) -> list:
        """Coordinates of the image of ``v`` in V*/X, via the complement spanned by
        the standard vectors at the non-pivot columns."""
        w = self.reduce(v)
        piv = set(self.pivots)
        return [w[c] for c in range(self.ambient) if c not in piv]

    def issubset(self, other: "Flat") -> bool:
        if self.dim > other.dim:
            return False
        return all(other.contains_vector(r) for r in self.rows)

    def __le__(self, other: "Flat") -> bool:
        return self.issubset(other)

    def __add__(self, other: "Flat") -> "Flat":
        return Flat(self.ambient, list(self.rows) + list(other.rows))

    def intersect(self, other: "Flat") -> "Flat":
        """X cap Y via the kernel of [X; -Y] acting on coefficient vectors."""
        if self.dim == 0 or other.dim == 0:
            return Flat.zero(self.ambient)
        a, b = list(self.rows), list(other.rows)
        one = _one_like(a[0][0])
        zero = one - one
        cols = len(a) + len(b)
        # coefficient vectors (lam, mu) with lam.A = mu.B
        system = [[a[i][j] for i in range(len(a))] + [-b[i][j] for i in range(len(b))] for j in range(self.ambient)]
        ker = linalg.nullspace(system, cols, zero, one)
        vecs = [linalg.vec_mat(k[: len(a)], a) for k in ker]
        return Flat(self.ambient, vecs)

    def __and__(self, other: "Flat") -> "Flat":
        return self.intersect(other)


def _one_like(x: Any) -> Any:
    if isinstance(x, Cyclotomic):
        return Cyclotomic(x.order, [1])
    return Fraction(1)


@dataclass(frozen=True)
class Provenance:
    """How an arrangement was derived from a parent arrangement.

    ``fibers[j]`` lists the parent hyperplanes mapping to hyperplane ``j``;
    ``images[i]`` is the raw (not rescaled) image covector of parent hyperplane
    ``i`` when it survives, which keeps scalings consistent across constructions.
    """

    kind: str
    flat: Flat
    fibers: tuple[tuple[int, ...], ...]
    images: dict = dc_field(default_factory=dict)
    basis: tuple = ()


class Arrangement:
    """A central arrangement of lines in V* (``dim`` = dim V*)."""

    def __init__(
        self,
        dim: int,
        covectors: Sequence[Sequence[Any]],
        field: Field = QQ,
        provenance: Provenance | None = None,
        name: str | None = None,
        allow_empty: bool = False,
    ) -> None:
        if allow_empty and dim == 0 and not covectors:
            self.dim, self.field, self.covectors = 0, field, ()
            self.provenance, self.name, self._index = provenance, name, {}
            return
        if dim < 1:
            raise ValidationError("dimension must be positive", dim=dim)
        canon: list[Vector] = []
        seen: dict[Vector, int] = {}
        for i, cv in enumerate(covectors):
            if len(cv) != dim:
                raise ValidationError("covector length does not match dimension", index=i, dim=dim)
            v = canonical_covector([field(x) for x in cv])
            if v in seen:
                raise DuplicateHyperplane(
                    "covectors %d and %d are proportional" % (seen[v], i), first=seen[v], second=i
                )
            seen[v] = i
            canon.append(v)
        if not canon:
            raise ValidationError("an arrangement needs at least one hyperplane")
        self.dim = dim
        self.field = field
        self.covectors: tuple[Vector, ...] = tuple(canon)
        self.provenance = provenance
        self.name = name
        self._index = seen

    def __len__(self) -> int:
        return len(self.covectors)

    def __repr__(self) -> str:
        return "Arrangement(dim=%d, %s)" % (self.dim, [format_vector(v) for v in self.covectors])

    def __eq__(self, other: Any) -> bool:
        return (
            isinstance(other, Arrangement)
            and self.dim == other.dim
            and self.field == other.field
            and set(self.covectors) == set(other.covectors)
        )

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.covectors)))

    def line(self, i: int) -> Flat:
        return Flat(self.dim, [self.covectors[i]])

    def index_of(self, v: Sequence[Any]) -> int | None:
        try:
            return self._index.get(canonical_covector([self.field(x) for x in v]))
        except ZeroCovector:
            return None

    def one(self) -> Any:
        return self.field.one()

    def zero(self) -> Any:
        return self.field.zero()

    def full_flat(self) -> Flat:
        return Flat.full(self.dim, self.one())

    def span(self, indices: Iterable[int] | None = None) -> Flat:
        idx = range(len(self)) if indices is None else indices
        return Flat(self.dim, [self.covectors[i] for i in idx])

    def hyperplanes_in(self, flat: Flat) -> frozenset[int]:
        return frozenset(i for i, v in enumerate(self.covectors) if flat.contains_vector(v))

    def describe_hyperplane(self, i: int) -> str:
        return format_vector(self.covectors[i])

    def to_json(self) -> dict[str, Any]:
        return {
            "field": self.field.to_json(),
            "dim": self.dim,
            "hyperplanes": [[scalar_to_json(x) for x in v] for v in self.covectors],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Arrangement":
        try:
            fld = Field.from_json(data.get("field", {"type": "rational"}))
            dim = int(data["dim"])
            hyps = [[scalar_from_json(x, fld) for x in h] for h in data["hyperplanes"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError("malformed arrangement JSON", error=str(exc)) from exc
        return cls(dim, hyps, fld)


def make_arrangement(dim: int, covectors: Sequence[Sequence[Any]], field: Field = QQ) -> Arrangement:
    return Arrangement(dim, covectors, field)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------
def is_essential(A: Arrangement) -> bool:
    return A.span().dim == A.dim


def essentialize(A: Arrangement) -> Arrangement:
    """The induced arrangement on the span W of the covectors (dual of V/W^perp)."""
    W = A.span()
    if W.dim == A.dim:
        return A
    return quotient(A, W, _check=False)


def _require_in_lattice(A: Arrangement, X: Flat) -> frozenset[int]:
    from .errors import FlatNotInLattice

    if X.ambient != A.dim:
        raise FlatNotInLattice("flat lives in a different ambient space", flat=X.describe())
    hyps = A.hyperplanes_in(X)
    if A.span(hyps) != X:
        raise FlatNotInLattice("flat is not a sum of hyperplanes of the arrangement", flat=X.describe())
    return hyps


def restriction(A: Arrangement, X: Flat, _check: bool = True) -> Arrangement:
    """The arrangement A/X = {(H+X)/X : H not in X} on V*/X.

    V*/X is identified with the span of the standard basis vectors at the
    non-pivot columns of X, which fixes explicit quotient coordinates.
    """
    if _check:
        _require_in_lattice(A, X)
    images: dict[int, tuple] = {}
    order: list[tuple] = []
    fibers: dict[tuple, list[int]] = {}
    for i, v in enumerate(A.covectors):
        w = X.quotient_coordinates(v)
        if all(c == 0 for c in w):
            continue
        images[i] = tuple(w)
        cw = canonical_covector(w)
        if cw not in fibers:
            fibers[cw] = []
            order.append(cw)
        fibers[cw].append(i)
    piv = set(X.pivots)
    basis = tuple(c for c in range(A.dim) if c not in piv)
    prov = Provenance("restriction", X, tuple(tuple(fibers[c]) for c in order), images, basis)
    # restricting an essential arrangement to V* leaves the empty arrangement on 0
    return Arrangement(A.dim - X.dim, order, A.field, prov, allow_empty=not order)


def quotient(A: Arrangement, X: Flat, _check: bool = True) -> Arrangement:
    """The arrangement A|_X = {H in A : H subset X}, in the echelon coordinates of X."""
    hyps = _require_in_lattice(A, X) if _check else A.hyperplanes_in(X)
    idx = sorted(hyps)
    images = {i: tuple(X.coordinates(A.covectors[i])) for i in idx}
    prov = Provenance("quotient", X, tuple((i,) for i in idx), images, X.rows)
    return Arrangement(X.dim, [images[i] for i in idx], A.field, prov, allow_empty=not idx)


def cone(A: Arrangement) -> Arrangement:
    """The cone: covectors padded by a zero, plus the new coordinate line L*."""
    zero, one = A.zero(), A.one()
    covs = [tuple(v) + (zero,) for v in A.covectors]
    covs.append(tuple([zero] * A.dim + [one]))
    return Arrangement(A.dim + 1, covs, A.field)


def direct_sum(A1: Arrangement, A2: Arrangement) -> Arrangement:
    if A1.field != A2.field:
        if A1.field.is_rational:
            fld = A2.field
        elif A2.field.is_rational:
            fld = A1.field
        else:
            raise FieldMismatch("direct sum of arrangements over different fields")
    else:
        fld = A1.field
    z = fld.zero()
    covs = [tuple(fld(x) for x in v) + (z,) * A2.dim for v in A1.covectors]
    covs += [(z,) * A1.dim + tuple(fld(x) for x in v) for v in A2.covectors]
    return Arrangement(A1.dim + A2.dim, covs, fld)


def cone_line(A: Arrangement) -> Flat:
    """The line L* added by :func:`cone`, as a flat of the coned space."""
    one, zero = A.one(), A.zero()
    return Flat(A.dim + 1, [[zero] * A.dim + [one]])


# ---------------------------------------------------------------------------
# builtin catalog
# ---------------------------------------------------------------------------
def _unit(n: int, i: int, one: Any) -> list:
    zero = one - one
    return [one if j == i else zero for j in range(n)]


def braid(l: int) -> Arrangement:
    """Differences x_i - x_j (i < j) in dual dimension l+1, essentialized to dim l."""
    if l < 1:
        raise BadParams("braid(l) needs l >= 1", l=l)
    n = l + 1
    one = Fraction(1)
    covs = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [Fraction(0)] * n
            v[i], v[j] = one, -one
            covs.append(v)
    A = essentialize(Arrangement(n, covs, QQ))
    A.name = "braid:%d" % l
    return A


def monomial(l: int, q: int) -> Arrangement:
    """Reflection arrangement of the full monomial group, over Q(zeta_q), dual dim l+1.

    Covectors x_1..x_{l+1} and x_i - zeta^n x_j for 1 <= n <= q; the pair
    (i, j) and (j, i) give proportional covectors, so only i < j is listed.
    """
    if l < 1 or q < 1:
        raise BadParams("monomial(l, q) needs l >= 1 and q >= 1", l=l, q=q)
    # Q(zeta_1) = Q(zeta_2) = Q: keep those over the rationals so they combine freely
    fld = QQ if q <= 2 else Field(q)
    cyc = Field(q)
    n = l + 1
    one = fld.one()
    covs = [_unit(n, i, one) for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(1, q + 1):
                v = [fld.zero()] * n
                v[i] = one
                z = cyc.zeta(k)
                v[j] = -(z.coeffs[0] if fld.is_rational else z)
                covs.append(v)
    A = Arrangement(n, covs, fld)
    A.name = "monomial:%d,%d" % (l, q)
    return A


def _int_arr(dim: int, rows: Sequence[Sequence[int]], name: str) -> Arrangement:
    A = Arrangement(dim, [[Fraction(x) for x in r] for r in rows], QQ)
    A.name = name
    return A


def ex_irred() -> Arrangement:
    return _int_arr(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 0, 1)], "ex_irred")


def ex_ss_not_enough() -> Arrangement:
    return _int_arr(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1), (0, 1, -1)], "ex_ss_not_enough")


def ex_only_one_modular() -> Arrangement:
    rows = [
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, 1),
        (1, 0, 1),
        (0, 1, -1),
        (0, 2, -1),
        (0, 1, -2),
        (1, 1, -1),
        (1, -2, 2),
    ]
    return _int_arr(3, rows, "ex_only_one_modular")


def ex_pred3() -> Arrangement:
    rows = [
        (1, 0, 0, 0),
        (0, 1, 0, 0),
        (0, 0, 1, 0),
        (0, 0, 0, 1),
        (1, 0, 0, -1),
        (0, 1, 0, -1),
        (0, 0, 1, -1),
    ]
    return _int_arr(4, rows, "ex_pred3")


def projective_line(points: Sequence[Any]) -> Arrangement:
    """Points of P^1 (rationals or the string 'inf') as lines in a 2-dim V*.

    The point a corresponds to the covector x - a*y, and infinity to y, so that
    the affine coordinate is z = x/y.
    """
    covs = []
    for p in points:
        if isinstance(p, str) and p.lower() in ("inf", "oo", "infinity"):
            covs.append((Fraction(0), Fraction(1)))
        else:
            covs.append((Fraction(1), -Fraction(p)))
    A = Arrangement(2, covs, QQ)
    A.name = "p1:" + ",".join(str(p) for p in points)
    return A


BUILTINS: dict[str, str] = {
    "braid": "braid:l -- differences x_i - x_j in dual dim l+1, essentialized",
    "monomial": "monomial:l,q -- full monomial group arrangement over Q(zeta_q), dual dim l+1",
    "ex_irred": "ex_irred -- {x, y, z, x+y, x+z}",
    "ex_ss_not_enough": "ex_ss_not_enough -- {x1, x2, x3, x1+x2-x3, x2-x3}",
    "ex_only_one_modular": "ex_only_one_modular -- the nine-line example with one modular coatom",
    "ex_pred3": "ex_pred3 -- {x1, x2, x3, x4, x1-x4, x2-x4, x3-x4}",
    "p1": "p1:a,b,... -- points of the projective line (use 'inf' for infinity)",
}


def builtin(name: str, params: Sequence[Any] = ()) -> Arrangement:
    """Construct a catalog arrangement by name."""
    params = list(params)

    def ints(k: int) -> list[int]:
        if len(params) != k:
            raise BadParams("%s expects %d integer parameter(s)" % (name, k), params=params)
        try:
            return [int(p) for p in params]
        except (TypeError, ValueError) as exc:
            raise BadParams("parameters must be integers", params=params) from exc

    if name == "braid":
        (l,) = ints(1)
        return braid(l)
    if name == "monomial":
        l, q = ints(2)
        return monomial(l, q)
    if name == "p1":
        if len(params) < 1:
            raise BadParams("p1 needs at least one point")
        try:
            return projective_line([p if str(p).lower() in ("inf", "oo", "infinity") else Fraction(p) for p in params])
        except (ValueError, ZeroDivisionError) as exc:
            raise BadParams("bad point", params=params) from exc
    simple = {
        "ex_irred": ex_irred,
        "ex_ss_not_enough": ex_ss_not_enough,
        "ex_only_one_modular": ex_only_one_modular,
        "ex_pred3": ex_pred3,
    }
    if name in simple:
        if params:
            raise BadParams("%s takes no parameters" % name, params=params)
        return simple[name]()
    raise UnknownBuiltin("unknown builtin arrangement %r" % name, name=name, known=sorted(BUILTINS))


def parse_builtin_spec(spec: str) -> Arrangement:
    """Parse ``name`` or ``name:p1,p2`` (an optional ``builtin:`` prefix is accepted)."""
    if spec.startswith("builtin:"):
        spec = spec[len("builtin:"):]
    name, _, rest = spec.partition(":")
    params = [p for p in rest.split(",") if p != ""] if rest else []
    return builtin(name, params)
