"""Boundary combinatorics of the simplicial domains Delta_{sigma,n} of the full
monomial group arrangement A_{l,q}.

Delta_{sigma,n} is cut out by 0 < |x_sigma(1)| < ... < |x_sigma(l+1)| with all
mu^{-n_i} x_i sharing one argument.  The irreducible divisors meeting its
boundary are

* X(delta) = span{x_j : j in delta} for initial segments delta of sigma of
  length <= l, with vector mu^{-n_sigma(i)} x_sigma(i) (sigma(i) the last element);
* X(lambda, nu) = span{mu^{-n_a} x_a - mu^{-n_b} x_b : a, b in lambda} for
  contiguous segments lambda = {sigma(i), ..., sigma(j)}, i < j, with vector
  mu^{-n_sigma(j)} x_sigma(j) - mu^{-n_sigma(i)} x_sigma(i).

Both families are reconstructed from the vector assignment; V* itself gets the
vector of the full initial segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Any, Sequence

from .arrangement import Arrangement, monomial
from .errors import BadResidue, InternalError, ValidationError
from .field import Cyclotomic, format_scalar
from .lattice import BuildingSet, IntersectionLattice, build_lattice, irreducible_building_set
from .nested import NestedSet, is_adapted_basis, is_nested, maximal_nested_sets


@dataclass
class DomainFlat:
    kind: str  # "delta", "lambda" or "top"
    segment: tuple[int, ...]  # 1-based coordinate indices, in sigma order
    flat: int
    vector: tuple[Any, ...]
    hyperplane: int


@dataclass
class MonomialDomain:
    l: int
    q: int
    sigma: tuple[int, ...]
    n: tuple[int, ...]
    A: Arrangement
    L: IntersectionLattice
    G: BuildingSet
    flats: list[DomainFlat]
    nested_sets: list[NestedSet] = field(default_factory=list)

    @property
    def beta(self) -> dict[int, int]:
        return {f.flat: f.hyperplane for f in self.flats}

    def adapted_basis(self, S: NestedSet) -> dict[int, int]:
        return {Y: self.beta[Y] for Y in S}

    def to_json(self) -> dict[str, Any]:
        return {
            "l": self.l,
            "q": self.q,
            "sigma": list(self.sigma),
            "n": list(self.n),
            "flats": [
                {
                    "kind": f.kind,
                    "segment": list(f.segment),
                    "flat": self.L.describe(f.flat),
                    "vector": [format_scalar(x) for x in f.vector],
                }
                for f in self.flats
            ],
            "nested_sets": [S.describe() for S in self.nested_sets],
        }


def _mu_power(q: int, k: int) -> Any:
    """mu^k for a primitive q-th root of unity mu, in the field of monomial(l, q)."""
    if q == 1:
        return Fraction(1)
    if q == 2:
        return Fraction((-1) ** (k % 2))
    return Cyclotomic.zeta(q, k % q)


@lru_cache(maxsize=16)
def _setup(l: int, q: int) -> tuple[Arrangement, IntersectionLattice, BuildingSet, BuildingSet, tuple[NestedSet, ...]]:
    A = monomial(l, q)
    L = build_lattice(A)
    F = irreducible_building_set(L)
    G = F.with_top()
    return A, L, F, G, tuple(maximal_nested_sets(G))


def monomial_domain(l: int, q: int, sigma: Sequence[int], n: Sequence[int]) -> MonomialDomain:
    """Divisors meeting the boundary of Delta_{sigma,n}, their vectors, and the
    maximal F-nested sets built from them (each with its adapted basis).

    sigma is a permutation of 1..l+1; n_i in 1..q is the residue attached to x_i.
    """
    sigma = tuple(int(s) for s in sigma)
    n = tuple(int(x) for x in n)
    if sorted(sigma) != list(range(1, l + 2)):
        raise ValidationError("sigma must be a permutation of 1..l+1", sigma=list(sigma))
    if len(n) != l + 1 or any(not 1 <= x <= q for x in n):
        raise BadResidue("residues must be l+1 integers in 1..q", n=list(n), q=q)
    A, L, F, G, maximal = _setup(l, q)
    fld = A.field
    dim = l + 1

    def unit(i: int) -> list[Any]:
        v = [fld.zero()] * dim
        v[i - 1] = fld(_mu_power(q, -n[i - 1]))
        return v

    def add(kind: str, seg: tuple[int, ...], vec: list[Any], span: list[list[Any]]) -> DomainFlat:
        h = A.index_of(vec)
        if h is None:
            raise InternalError("assigned vector is not a hyperplane of the arrangement", segment=list(seg))
        hyps = [A.index_of(v) for v in span]
        if any(x is None for x in hyps):
            raise InternalError("spanning vector is not a hyperplane", segment=list(seg))
        X = L.flat_of_hyps(hyps)
        return DomainFlat(kind, seg, X, tuple(vec), h)

    flats: list[DomainFlat] = []
    for i in range(1, dim + 1):
        seg = sigma[:i]
        kind = "delta" if i <= l else "top"
        flats.append(add(kind, seg, unit(sigma[i - 1]), [unit(j) for j in seg]))
    for i in range(dim):
        for j in range(i + 1, dim):
            seg = sigma[i:j + 1]
            first, last = sigma[i], sigma[j]
            vec = [x - y for x, y in zip(unit(last), unit(first))]
            span = [[x - y for x, y in zip(unit(b), unit(a))] for a, b in zip(seg, seg[1:])]
            flats.append(add("lambda", seg, vec, span))
    for f in flats:
        if f.kind != "top" and f.flat not in F:
            raise InternalError("boundary flat is not irreducible", flat=L.describe(f.flat))
        if f.hyperplane not in L.hyps[f.flat]:
            raise InternalError("assigned vector does not lie in its flat", flat=L.describe(f.flat))
    allowed = {f.flat for f in flats}
    if len(allowed) != len(flats):
        raise InternalError("two boundary families give the same flat")
    dom = MonomialDomain(l, q, sigma, n, A, L, G, flats)
    beta = dom.beta
    for S in maximal:
        if set(S.elements) <= allowed:
            if not is_nested(S.elements, G) or not is_adapted_basis(S, {Y: beta[Y] for Y in S}):
                raise InternalError("assigned vectors do not give an adapted basis", nested=S.describe())
            dom.nested_sets.append(S)
    if not dom.nested_sets:
        raise InternalError("no maximal nested set is supported on the boundary flats")
    return dom
