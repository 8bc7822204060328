"""G-nested sets, adapted bases, restriction/quotient of nested sets, predecessors."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .errors import InternalError, NoAdaptedBasis, NotAChain, ValidationError
from .lattice import BuildingSet, IntersectionLattice, SubLattice, building_quotient, building_restrict
from .linalg import rank


@dataclass(frozen=True)
class NestedSet:
    """A G-nested family, stored as flat indices into ``G.L``."""

    G: BuildingSet
    elements: tuple[int, ...]

    @staticmethod
    def of(G: BuildingSet, elements: Iterable[int]) -> "NestedSet":
        L = G.L
        return NestedSet(G, tuple(sorted(set(elements), key=lambda i: (L.dims[i], i))))

    @property
    def L(self) -> IntersectionLattice:
        return self.G.L

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, i: int) -> bool:
        return i in self.elements

    def describe(self) -> list[str]:
        return [self.L.describe(i) for i in self.elements]


def _antichains_with(L: IntersectionLattice, pool: Sequence[int], g: int) -> Iterator[list[int]]:
    """Nonempty subsets T of ``pool`` such that T + {g} is an antichain."""
    cands = [y for y in pool if not L.leq(y, g) and not L.leq(g, y)]

    def rec(start: int, cur: list[int]) -> Iterator[list[int]]:
        for k in range(start, len(cands)):
            y = cands[k]
            if all(not L.leq(y, z) and not L.leq(z, y) for z in cur):
                cur.append(y)
                yield list(cur)
                yield from rec(k + 1, cur)
                cur.pop()

    yield from rec(0, [])


def _can_add(G: BuildingSet, S: Sequence[int], g: int) -> bool:
    L = G.L
    for T in _antichains_with(L, S, g):
        if L.join_all(T + [g]) in G:
            return False
    return True


def is_nested(S: Iterable[int], G: BuildingSet) -> bool:
    """Every antichain of at least two members sums to a flat outside G."""
    S = list(S)
    if any(s not in G for s in S):
        return False
    for k in range(1, len(S)):
        if not _can_add(G, S[:k], S[k]):
            return False
    return True


def is_maximal_nested(S: Iterable[int], G: BuildingSet) -> bool:
    S = list(S)
    if not is_nested(S, G):
        return False
    return not any(_can_add(G, S, g) for g in G if g not in S)


def maximal_nested_sets(G: BuildingSet) -> list[NestedSet]:
    """All maximal G-nested sets, by backtracking over G ordered by (dim, index)."""
    L = G.L
    order = sorted(G.elements, key=lambda i: (L.dims[i], i))
    found: list[NestedSet] = []

    def rec(start: int, cur: list[int]) -> None:
        extended = False
        for k in range(start, len(order)):
            g = order[k]
            if _can_add(G, cur, g):
                cur.append(g)
                rec(k + 1, cur)
                cur.pop()
        # maximality must be tested against all of G, not just later elements
        for g in order:
            if g not in cur and _can_add(G, cur, g):
                extended = True
                break
        if not extended:
            found.append(NestedSet.of(G, cur))

    rec(0, [])
    top_dim = L.dims[L.top]
    for S in found:
        if len(S) != top_dim:
            raise InternalError("maximal nested set has the wrong cardinality", size=len(S), dim=top_dim)
    return sorted(found, key=lambda S: [L.flats[i].key() for i in S])


def adjacent(S: NestedSet, T: NestedSet) -> bool:
    """Two maximal nested sets are adjacent when they differ in exactly one element."""
    return len(set(S.elements) ^ set(T.elements)) == 2


# ---------------------------------------------------------------------------
# p_S, successors, predecessors
# ---------------------------------------------------------------------------
def _min_of_chain(L: IntersectionLattice, members: list[int]) -> int:
    members = sorted(set(members), key=lambda i: L.dims[i])
    for a, b in zip(members, members[1:]):
        if not L.leq(a, b):
            raise NotAChain("members containing the vector are not totally ordered",
                            flats=[L.describe(m) for m in members])
    return members[0]


def p_in_S(v: Sequence, S: NestedSet) -> int:
    """Minimal element of {Y in S : v in Y} + {V*}."""
    L = S.L
    if all(c == 0 for c in v):
        raise ValidationError("p_S is undefined for the zero vector")
    members = [Y for Y in S if L.flats[Y].contains_vector(v)] + [L.top]
    return _min_of_chain(L, members)


def p_of_hyperplane(S: NestedSet, h: int) -> int:
    L = S.L
    members = [Y for Y in S if h in L.hyps[Y]] + [L.top]
    return _min_of_chain(L, members)


def successor(X: int, S: NestedSet) -> int:
    """X^+: the minimal element of S strictly containing X (V* if none)."""
    L = S.L
    if X == L.top:
        raise ValidationError("V* has no successor")
    return _min_of_chain(L, [Y for Y in S if L.lt(X, Y)] + [L.top])


def predecessors(S: NestedSet, X: int) -> list[int]:
    """P(X) = {Y in S : Y^+ = X}."""
    L = S.L
    return [Y for Y in S if Y != L.top and successor(Y, S) == X]


# ---------------------------------------------------------------------------
# adapted bases
# ---------------------------------------------------------------------------
AdaptedBasis = dict  # flat index -> hyperplane index


def is_adapted_basis(S: NestedSet, beta: AdaptedBasis) -> bool:
    L = S.L
    A = L.A
    if set(beta) != set(S.elements):
        return False
    for X in S:
        if beta[X] not in L.hyps[X]:
            return False
        below = [beta[Y] for Y in S if L.leq(Y, X)]
        if len(below) != L.dims[X] or rank([A.covectors[h] for h in below]) != L.dims[X]:
            return False
    return True


def adapted_bases(S: NestedSet) -> list[AdaptedBasis]:
    """All adapted bases; candidates for beta(X) are the hyperplanes with p_S = X."""
    L = S.L
    cands = {X: [h for h in sorted(L.hyps[X]) if p_of_hyperplane(S, h) == X] for X in S}
    out = []
    keys = list(S.elements)
    for choice in product(*(cands[X] for X in keys)):
        beta = dict(zip(keys, choice))
        if is_adapted_basis(S, beta):
            out.append(beta)
    if not out:
        raise NoAdaptedBasis("maximal nested set admits no adapted basis", nested=S.describe())
    for beta in out:
        for X in S:
            if p_of_hyperplane(S, beta[X]) != X:
                raise InternalError("adapted basis violates p_S(beta(X)) = X")
    return out


# ---------------------------------------------------------------------------
# restriction and quotient of nested sets
# ---------------------------------------------------------------------------
@dataclass
class DerivedNested:
    """A nested set on a derived arrangement, with the translation from S."""

    S: NestedSet
    sub: SubLattice
    source: dict[int, int]  # derived flat index -> an element of the original S


def nested_restrict(S: NestedSet, X: int) -> DerivedNested:
    """S|_X = {Y in S : Y subset X}, a maximal G|_X-nested set."""
    L = S.L
    GX, sub = building_restrict(S.G, X)
    src = {sub.translate[Y]: Y for Y in S if L.leq(Y, X)}
    R = NestedSet.of(GX, src)
    if not is_maximal_nested(R.elements, GX) or len(R) != L.dims[X]:
        raise InternalError("S|_X is not a maximal nested set", flat=L.describe(X))
    return DerivedNested(R, sub, src)


def nested_quotient(S: NestedSet, X: int) -> DerivedNested:
    """S/X = {(Y+X)/X : Y in S, Y not subset X}, a maximal G/X-nested set."""
    L = S.L
    GX, sub = building_quotient(S.G, X)
    src = {sub.translate[Y]: Y for Y in S if not L.leq(Y, X)}
    if len(src) != sum(1 for Y in S if not L.leq(Y, X)):
        raise InternalError("distinct members of S have equal images in S/X")
    Q = NestedSet.of(GX, src)
    if not is_maximal_nested(Q.elements, GX) or len(Q) != L.dims[L.top] - L.dims[X]:
        raise InternalError("S/X is not a maximal nested set", flat=L.describe(X))
    return DerivedNested(Q, sub, src)


def restrict_basis(S: NestedSet, beta: AdaptedBasis, D: DerivedNested) -> AdaptedBasis:
    """beta|_X: the hyperplane beta(Y) viewed in A|_X."""
    back = {orig[0]: j for j, orig in enumerate(D.sub.A.provenance.fibers)}
    return {d: back[beta[y]] for d, y in D.source.items()}


def quotient_basis(S: NestedSet, beta: AdaptedBasis, D: DerivedNested) -> AdaptedBasis:
    """beta/X: the image (beta(Y)+X)/X of beta(Y) in A/X."""
    img = {}
    for j, fib in enumerate(D.sub.A.provenance.fibers):
        for h in fib:
            img[h] = j
    return {d: img[beta[y]] for d, y in D.source.items()}


def brute_force_maximal_nested(G: BuildingSet) -> list[frozenset[int]]:
    """Oracle: scan all subsets of G, testing every antichain directly."""
    L = G.L
    els = sorted(G.elements)

    def nested(sub: Sequence[int]) -> bool:
        for r in range(2, len(sub) + 1):
            for T in combinations(sub, r):
                if all(not L.leq(a, b) and not L.leq(b, a) for a, b in combinations(T, 2)):
                    if L.join_all(T) in G:
                        return False
        return True

    all_nested = [frozenset(sub) for r in range(1, L.dims[L.top] + 2)
                  for sub in combinations(els, r) if nested(sub)]
    return [S for S in all_nested if not any(S < T for T in all_nested)]
