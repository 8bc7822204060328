"""Intersection lattices, decompositions, irreducible flats and building sets.

Every flat of L(A) is determined by the set of hyperplanes it contains, so most
lattice queries reduce to set operations on those index sets plus a rank
computation.  Flats are numbered in the deterministic order (dim, echelon key).
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .arrangement import Arrangement, Flat, cone, cone_line, quotient, restriction
from .errors import ClosureFailed, FlatNotInBuildingSet, FlatNotInLattice, InternalError, NotABuildingSet


class IntersectionLattice:
    """L(A): all sums of lines of A (including 0), ordered by inclusion."""

    def __init__(self, A: Arrangement, flats: Sequence[Flat]) -> None:
        self.A = A
        self.flats: list[Flat] = sorted(flats, key=Flat.key)
        self.index: dict[Flat, int] = {F: i for i, F in enumerate(self.flats)}
        self.hyps: list[frozenset[int]] = [A.hyperplanes_in(F) for F in self.flats]
        self.by_hyps: dict[frozenset[int], int] = {h: i for i, h in enumerate(self.hyps)}
        self.dims: list[int] = [F.dim for F in self.flats]
        self._join: dict[tuple[int, int], int] = {}
        self._span_cache: dict[frozenset[int], int] = {}
        self._derived: dict[tuple, object] = {}
        self.bottom = self.by_hyps[frozenset()]
        self.line_index: list[int] = [self.index[A.line(i)] for i in range(len(A))]

    def __len__(self) -> int:
        return len(self.flats)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.flats)))

    @cached_property
    def top(self) -> int:
        return max(range(len(self.flats)), key=lambda i: (self.dims[i], -i))

    @property
    def is_essential(self) -> bool:
        return self.dims[self.top] == self.A.dim

    def nonzero(self) -> list[int]:
        return [i for i in self if self.dims[i] > 0]

    def find(self, X: Flat) -> int:
        """Index of ``X``; raises FlatNotInLattice when X is not a flat of L(A)."""
        i = self.index.get(X)
        if i is None:
            raise FlatNotInLattice("subspace is not in the intersection lattice", flat=X.describe())
        return i

    def flat_of_hyps(self, hyps: Iterable[int]) -> int:
        """Index of the span of the given hyperplanes."""
        key = frozenset(hyps)
        r = self.by_hyps.get(key)
        if r is None:
            r = self._span_cache.get(key)
            if r is None:
                r = self.index[self.A.span(key)]
                self._span_cache[key] = r
        return r

    def leq(self, i: int, j: int) -> bool:
        """X_i subset X_j."""
        return self.hyps[i] <= self.hyps[j]

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.hyps[i] <= self.hyps[j]

    def join(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        key = (i, j)
        r = self._join.get(key)
        if r is None:
            r = self.index[self.flats[i] + self.flats[j]]
            self._join[key] = r
        return r

    def join_all(self, idx: Iterable[int]) -> int:
        out = self.bottom
        for i in idx:
            out = self.join(out, i)
        return out

    def meet_dim(self, i: int, j: int) -> int:
        """dim(X_i cap X_j) by the dimension formula."""
        return self.dims[i] + self.dims[j] - self.dims[self.join(i, j)]

    def intersection_in_lattice(self, i: int, j: int) -> bool:
        """Whether X_i cap X_j is again a flat: compare with the span of the common lines."""
        common = self.by_hyps.get(self.hyps[i] & self.hyps[j])
        if common is None:
            common = self.flat_of_hyps(self.hyps[i] & self.hyps[j])
        return self.dims[common] == self.meet_dim(i, j)

    def meet(self, i: int, j: int) -> int | None:
        """Index of X_i cap X_j if it lies in L(A), else None."""
        if not self.intersection_in_lattice(i, j):
            return None
        return self.flat_of_hyps(self.hyps[i] & self.hyps[j])

    def below(self, i: int) -> list[int]:
        """Flats contained in X_i (including 0 and X_i)."""
        return [j for j in self if self.hyps[j] <= self.hyps[i]]

    @cached_property
    def covers(self) -> list[tuple[int, int]]:
        out = []
        for i in self:
            for j in self:
                if self.dims[j] == self.dims[i] + 1 and self.hyps[i] < self.hyps[j]:
                    out.append((i, j))
        return out

    def describe(self, i: int) -> str:
        return self.flats[i].describe()

    def of_dim(self, d: int) -> list[int]:
        return [i for i in self if self.dims[i] == d]


def build_lattice(A: Arrangement) -> IntersectionLattice:
    """Saturate {0} and the lines of A under joins with lines (equivalently, all joins)."""
    zero = Flat.zero(A.dim)
    lines = [A.line(i) for i in range(len(A))]
    found: dict[Flat, None] = {zero: None}
    frontier = [zero]
    while frontier:
        nxt = []
        for F in frontier:
            for L in lines:
                G = F + L
                if G not in found:
                    found[G] = None
                    nxt.append(G)
        frontier = nxt
    return IntersectionLattice(A, list(found))


def lattice_by_subsets(A: Arrangement) -> set[Flat]:
    """Brute-force oracle: the span of every subset of A."""
    out = set()
    n = len(A)
    for r in range(n + 1):
        for sub in combinations(range(n), r):
            out.add(A.span(sub))
    return out


# ---------------------------------------------------------------------------
# decompositions and irreducibles
# ---------------------------------------------------------------------------
def is_decomposition(L: IntersectionLattice, X: int, parts: Sequence[int]) -> bool:
    """Whether X = X_1 + ... + X_r is a decomposition in the lattice sense."""
    parts = list(parts)
    if not parts or any(L.dims[p] == 0 for p in parts):
        return False
    if sum(L.dims[p] for p in parts) != L.dims[X] or L.join_all(parts) != X:
        return False
    if len(parts) == 1:
        return True
    for Y in L.below(X):
        total = 0
        for p in parts:
            if not L.intersection_in_lattice(Y, p):
                return False
            total += L.meet_dim(Y, p)
        if total != L.dims[Y]:
            return False
    return True


def two_part_decompositions(L: IntersectionLattice, X: int) -> Iterator[tuple[int, int]]:
    """All decompositions {X1, X2} of X with X1 proper, nonzero (both orders are yielded)."""
    hx = L.hyps[X]
    for X1 in L.below(X):
        if X1 == X or L.dims[X1] == 0:
            continue
        rest = hx - L.hyps[X1]
        if not rest:
            continue
        X2 = L.flat_of_hyps(rest)
        if L.dims[X1] + L.dims[X2] != L.dims[X]:
            continue
        if is_decomposition(L, X, [X1, X2]):
            yield X1, X2


def is_irreducible(L: IntersectionLattice, X: int) -> bool:
    if L.dims[X] == 0:
        return False
    return next(two_part_decompositions(L, X), None) is None


def irreducible_decomposition(L: IntersectionLattice, X: int) -> list[int]:
    """The unique decomposition of X into irreducible flats.

    Peels off a smallest part of some two-part decomposition, which is
    necessarily irreducible, and recurses on the complement.
    """
    if L.dims[X] == 0:
        raise FlatNotInLattice("the zero flat has no decomposition")
    best = None
    for X1, X2 in two_part_decompositions(L, X):
        if best is None or (L.dims[X1], X1) < (L.dims[best[0]], best[0]):
            best = (X1, X2)
    if best is None:
        return [X]
    return sorted([best[0]] + irreducible_decomposition(L, best[1]))


def irreducibles(L: IntersectionLattice) -> frozenset[int]:
    """F(A): flats whose only decomposition is the trivial one."""
    key = ("irreducibles",)
    if key not in L._derived:
        L._derived[key] = frozenset(i for i in L.nonzero() if is_irreducible(L, i))
    return L._derived[key]  # type: ignore[return-value]


# ---------------------------------------------------------------------------
# building sets
# ---------------------------------------------------------------------------
class BuildingSet:
    """A subset of L(A) minus 0, held by flat indices into its lattice."""

    def __init__(self, L: IntersectionLattice, elements: Iterable[int]) -> None:
        self.L = L
        self.elements: frozenset[int] = frozenset(elements)
        if L.bottom in self.elements:
            raise NotABuildingSet("building sets do not contain the zero flat")

    def __contains__(self, i: int) -> bool:
        return i in self.elements

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BuildingSet) and other.L is self.L and other.elements == self.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def flats(self) -> list[Flat]:
        return [self.L.flats[i] for i in self]

    def with_top(self) -> "BuildingSet":
        """G together with V* (the standing convention for compactifications)."""
        return BuildingSet(self.L, self.elements | {self.L.top})

    def describe(self) -> list[str]:
        return [self.L.describe(i) for i in self]


def maximal_elements_below(L: IntersectionLattice, G: Iterable[int], X: int) -> list[int]:
    inside = [g for g in G if L.leq(g, X)]
    return sorted(g for g in inside if not any(L.lt(g, h) for h in inside))


def is_building_set(G: BuildingSet, check_equivalence: bool = True) -> bool:
    """Both defining conditions; cross-checked against the maximal-element characterization."""
    L = G.L
    F = irreducibles(L)
    cond1 = F <= G.elements
    cond2 = True
    if cond1:
        els = sorted(G.elements)
        for a, b in combinations(els, 2):
            s = L.join(a, b)
            if s in G.elements:
                continue
            if not is_decomposition(L, s, [a, b]):
                cond2 = False
                break
    result = cond1 and cond2
    if check_equivalence:
        alt = all(is_decomposition(L, X, maximal_elements_below(L, G.elements, X)) for X in L.nonzero())
        if alt != result:
            raise InternalError(
                "building-set conditions disagree with the maximal-element characterization",
                conditions=result,
                characterization=alt,
            )
    return result


def g_decomposition(G: BuildingSet, X: int) -> list[int]:
    """Maximal elements of G inside X; their direct sum is X."""
    L = G.L
    if L.dims[X] == 0:
        raise FlatNotInLattice("the zero flat has no G-decomposition")
    parts = maximal_elements_below(L, G.elements, X)
    if not is_decomposition(L, X, parts):
        raise NotABuildingSet("maximal G-elements of X do not decompose X", flat=L.describe(X))
    return parts


def irreducible_building_set(L: IntersectionLattice) -> BuildingSet:
    return BuildingSet(L, irreducibles(L))


def full_building_set(L: IntersectionLattice) -> BuildingSet:
    return BuildingSet(L, L.nonzero())


def minimal_building_set(L: IntersectionLattice, S: Iterable[int] = ()) -> BuildingSet:
    """Smallest building set containing S, by closing F(A) + S under non-decomposing sums."""
    cur = set(irreducibles(L)) | set(S)
    if L.bottom in cur:
        raise NotABuildingSet("the zero flat cannot be in a building set")
    changed = True
    while changed:
        changed = False
        for a, b in combinations(sorted(cur), 2):
            s = L.join(a, b)
            if s not in cur and not is_decomposition(L, s, [a, b]):
                cur.add(s)
                changed = True
    G = BuildingSet(L, cur)
    if not is_building_set(G):
        raise ClosureFailed("closure is not a building set", elements=[L.describe(i) for i in sorted(cur)])
    return G


def building_sets_brute_force(L: IntersectionLattice) -> list[frozenset[int]]:
    """Every building set of L (desk-scale oracle: subsets of the non-irreducible flats)."""
    F = irreducibles(L)
    free = [i for i in L.nonzero() if i not in F]
    out = []
    for r in range(len(free) + 1):
        for extra in combinations(free, r):
            G = BuildingSet(L, F | set(extra))
            if is_building_set(G, check_equivalence=False):
                out.append(G.elements)
    return out


# ---------------------------------------------------------------------------
# restriction / quotient / cone of building sets
# ---------------------------------------------------------------------------
class SubLattice:
    """Lattice of a derived arrangement together with the translation of flats."""

    def __init__(self, parent: IntersectionLattice, B: Arrangement, LB: IntersectionLattice, translate: dict[int, int]) -> None:
        self.parent = parent
        self.A = B
        self.L = LB
        self.translate = translate  # parent flat index -> flat index in self.L


def restricted_lattice(L: IntersectionLattice, X: int) -> SubLattice:
    """L(A|_X) with the map Y -> Y for Y subset X."""
    if ("restricted", X) in L._derived:
        return L._derived[("restricted", X)]  # type: ignore[return-value]
    B = quotient(L.A, L.flats[X], _check=False)
    LB = build_lattice(B)
    back = {orig[0]: j for j, orig in enumerate(B.provenance.fibers)}
    tr = {}
    for Y in L.below(X):
        tr[Y] = LB.flat_of_hyps(back[h] for h in L.hyps[Y])
    out = L._derived[("restricted", X)] = SubLattice(L, B, LB, tr)
    return out


def quotient_lattice(L: IntersectionLattice, X: int) -> SubLattice:
    """L(A/X) with the map Y -> (Y+X)/X for all Y in L(A)."""
    if ("quotient", X) in L._derived:
        return L._derived[("quotient", X)]  # type: ignore[return-value]
    B = restriction(L.A, L.flats[X], _check=False)
    LB = build_lattice(B)
    fibers = B.provenance.fibers
    tr = {}
    for Y in L:
        YX = L.hyps[L.join(Y, X)]
        tr[Y] = LB.flat_of_hyps(j for j, fib in enumerate(fibers) if fib[0] in YX)
    out = L._derived[("quotient", X)] = SubLattice(L, B, LB, tr)
    return out


def building_restrict(G: BuildingSet, X: int) -> tuple[BuildingSet, SubLattice]:
    """G|_X = {Y in G : Y subset X} as a building set of L(A|_X)."""
    ck = ("building_restrict", G.elements, X)
    if ck in G.L._derived:
        return G.L._derived[ck]  # type: ignore[return-value]
    out = _building_restrict(G, X)
    G.L._derived[ck] = out
    return out


def _building_restrict(G: BuildingSet, X: int) -> tuple[BuildingSet, SubLattice]:
    L = G.L
    if X not in G:
        raise FlatNotInBuildingSet("flat is not in the building set", flat=L.describe(X))
    sub = restricted_lattice(L, X)
    GX = BuildingSet(sub.L, {sub.translate[Y] for Y in G.elements if L.leq(Y, X)})
    if not is_building_set(GX):
        raise InternalError("G|_X is not a building set", flat=L.describe(X))
    if G.elements == irreducibles(L) and GX.elements != irreducibles(sub.L):
        raise InternalError("F(A)|_X differs from F(A|_X)", flat=L.describe(X))
    return GX, sub


def building_quotient(G: BuildingSet, X: int) -> tuple[BuildingSet, SubLattice]:
    """G/X = {(Y+X)/X : Y in G} minus 0 as a building set of L(A/X)."""
    ck = ("building_quotient", G.elements, X)
    if ck in G.L._derived:
        return G.L._derived[ck]  # type: ignore[return-value]
    out = _building_quotient(G, X)
    G.L._derived[ck] = out
    return out


def _building_quotient(G: BuildingSet, X: int) -> tuple[BuildingSet, SubLattice]:
    L = G.L
    if X not in G:
        raise FlatNotInBuildingSet("flat is not in the building set", flat=L.describe(X))
    sub = quotient_lattice(L, X)
    els = {sub.translate[Y] for Y in G.elements} - {sub.L.bottom}
    GX = BuildingSet(sub.L, els)
    if not is_building_set(GX):
        raise InternalError("G/X is not a building set", flat=L.describe(X))
    return GX, sub


def cone_building(G: BuildingSet) -> tuple[BuildingSet, IntersectionLattice]:
    """Extend G to a building set of the cone.

    The set G + {X + L* : X in G} is not closed under the building-set axiom in
    general (two elements X + L*, Y + L* overlap in L*), and it omits L* even
    though L* is irreducible in the cone.  We return the smallest building set
    containing G, L* and every X + L*, which is G + {L*} + {Z + L* : Z != 0 in
    L(A)}; it is computed both as a closure and by the explicit formula, and the
    two are compared.  F(A~) = F(A) + {L*} is asserted as well.
    """
    L = G.L
    C = cone(L.A)
    LC = build_lattice(C)
    ls = LC.index[cone_line(L.A)]

    def lift(i: int) -> int:
        return LC.flat_of_hyps(L.hyps[i])

    seed = {lift(i) for i in G.elements} | {ls} | {LC.join(lift(i), ls) for i in G.elements}
    closure = minimal_building_set(LC, seed)
    formula = {lift(i) for i in G.elements} | {ls} | {LC.join(lift(z), ls) for z in L.nonzero()}
    if closure.elements != frozenset(formula):
        raise InternalError("cone building set closure differs from the explicit formula")
    expected_F = {lift(i) for i in irreducibles(L)} | {ls}
    if irreducibles(LC) != expected_F:
        raise InternalError("irreducibles of the cone are not F(A) + {L*}")
    return closure, LC
