"""Modular and G-modular flats, modular complements, supersolvability.

All tests are exhaustive scans of the lattice; every negative answer comes with
a witness so that failures can be reported (and reproduced) concretely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .arrangement import Arrangement, Flat, direct_sum
from .errors import InternalError, NoComplement, NotAComplement
from .lattice import (
    BuildingSet,
    IntersectionLattice,
    build_lattice,
    building_quotient,
    building_restrict,
    cone_building,
    irreducible_building_set,
    is_building_set,
    quotient_lattice,
    restricted_lattice,
)
from .linalg import solve_in_span


# ---------------------------------------------------------------------------
# modular flats
# ---------------------------------------------------------------------------
def non_modularity_witnesses(L: IntersectionLattice, X: int) -> list[tuple[int, Flat]]:
    """All Y with X cap Y not in L(A), paired with the offending intersection."""
    out = []
    for Y in L:
        if not L.intersection_in_lattice(X, Y):
            out.append((Y, L.flats[X] & L.flats[Y]))
    return out


def is_modular(L: IntersectionLattice, X: int) -> tuple[bool, int | None]:
    """(modular?, first witness Y with X cap Y not in L(A))."""
    for Y in L:
        if not L.intersection_in_lattice(X, Y):
            return False, Y
    return True, None


def modular_flats(L: IntersectionLattice) -> list[int]:
    return [X for X in L if is_modular(L, X)[0]]


def _meet_in_G(L: IntersectionLattice, G: BuildingSet, X: int, M: int) -> bool:
    Z = L.meet(X, M)
    return Z is not None and (Z == L.bottom or Z in G)


def is_g_modular(L: IntersectionLattice, G: BuildingSet, M: int, require_in_G: bool = False) -> bool:
    """M modular and X cap M in G (or zero) for every X in G.

    Membership M in G is not required by default: with it, the direct sum of
    two arrangements with enough G-modular elements could never have enough
    (G1 + G2)-modular ones, since M1 + V2* is not in G1 + G2.  On the catalog
    both readings give the same answers to every "enough" question.
    """
    if require_in_G and M not in G:
        return False
    if not is_modular(L, M)[0]:
        return False
    return all(_meet_in_G(L, G, X, M) for X in G)


def g_modular_flats(L: IntersectionLattice, G: BuildingSet, require_in_G: bool = False) -> list[int]:
    return [M for M in L if is_g_modular(L, G, M, require_in_G)]


def _codim1(L: IntersectionLattice, flats: list[int]) -> list[int]:
    top = L.dims[L.top]
    return [M for M in flats if L.dims[M] == top - 1]


def _enough(L: IntersectionLattice, coatoms: list[int]) -> tuple[bool, dict[int, list[int]]]:
    """Direct test plus the intersection criterion (must agree)."""
    failing = {}
    for h in range(len(L.A)):
        if all(h in L.hyps[M] for M in coatoms):
            failing[h] = list(coatoms)
    direct = not failing
    meet = L.top
    for M in coatoms:
        meet = L.flat_of_hyps(L.hyps[meet] & L.hyps[M])
    # a common line of all coatoms lies in their intersection, and conversely
    fast = L.dims[meet] == 0
    if fast != direct:
        raise InternalError("intersection criterion disagrees with the direct test")
    return direct, failing


def has_enough_modular(L: IntersectionLattice) -> bool:
    return _enough(L, _codim1(L, modular_flats(L)))[0]


def has_enough_g_modular(L: IntersectionLattice, G: BuildingSet) -> bool:
    return _enough(L, _codim1(L, g_modular_flats(L, G)))[0]


def is_supersolvable(L: IntersectionLattice) -> list[int] | None:
    """A maximal chain 0 = X_0 < X_1 < ... < V* of modular flats, or None."""
    mods = set(modular_flats(L))
    top = L.top

    def rec(cur: int) -> list[int] | None:
        if cur == top:
            return [cur]
        for Y in L.of_dim(L.dims[cur] + 1):
            if Y in mods and L.leq(cur, Y):
                tail = rec(Y)
                if tail is not None:
                    return [cur] + tail
        return None

    return rec(L.bottom)


# ---------------------------------------------------------------------------
# modular complements and the restriction/quotient isomorphism
# ---------------------------------------------------------------------------
def _first_by_key(L: IntersectionLattice, cands: list[int]) -> int | None:
    return min(cands, key=lambda i: L.flats[i].key()) if cands else None


def modular_complement(L: IntersectionLattice, G: BuildingSet, X: int) -> int:
    """A G-modular M with V* = X (+) M, built by the inductive construction.

    Write X = H_1 + ... + H_n; take a complement M of Y = H_1 + ... + H_{n-1},
    let L = X cap M, choose a codimension-one G-modular N not containing L and
    return M cap N.  Ties are broken by the smallest canonical echelon key.
    """
    coatoms = _codim1(L, g_modular_flats(L, G))

    def rec(Xi: int) -> int:
        if L.dims[Xi] == 0:
            return L.top
        if Xi == L.top:
            return L.bottom
        lines: list[int] = []
        span = L.bottom
        for h in sorted(L.hyps[Xi]):
            nxt = L.join(span, L.line_index[h])
            if L.dims[nxt] > L.dims[span]:
                lines.append(h)
                span = nxt
        Y = L.flat_of_hyps(lines[:-1])
        M = rec(Y)
        line = L.meet(Xi, M)
        if line is None or L.dims[line] != 1:
            raise InternalError("X cap M is not a line of the arrangement")
        N = _first_by_key(L, [c for c in coatoms if not L.leq(line, c)])
        if N is None:
            raise NoComplement("no codimension-one G-modular flat avoids the line", line=L.describe(line))
        MN = L.meet(M, N)
        if MN is None:
            raise InternalError("intersection of modular flats left the lattice")
        return MN

    M = rec(X)
    if L.dims[X] + L.dims[M] != L.dims[L.top] or L.join(X, M) != L.top:
        raise InternalError("constructed complement is not complementary")
    if M != L.bottom and M != L.top and not is_g_modular(L, G, M):
        raise InternalError("constructed complement is not G-modular")
    return M


@dataclass
class RestrictionQuotientIso:
    """The map V*/X -> M, v + X -> (M-component of v), in explicit coordinates."""

    matrix: list[list[Any]]  # rows: coordinates on M's echelon basis; columns: quotient coordinates
    hyperplanes: dict[int, int]  # hyperplane of A/X -> hyperplane of A|_M
    flats: dict[int, int]  # flat of L(A/X) -> flat of L(A|_M)
    quotient: Any  # SubLattice for A/X
    restricted: Any  # SubLattice for A|_M


def m_component(L: IntersectionLattice, X: int, M: int, v: list) -> list:
    """Write v = x + m with x in X, m in M; return m (as a vector of V*)."""
    basis = list(L.flats[X].rows) + list(L.flats[M].rows)
    coeffs = solve_in_span(basis, v)
    if coeffs is None:
        raise NotAComplement("X and M do not span V*")
    nx = L.dims[X]
    m = [L.A.zero()] * L.A.dim
    for c, row in zip(coeffs[nx:], L.flats[M].rows):
        m = [a + c * b for a, b in zip(m, row)]
    return m


def restriction_quotient_iso(L: IntersectionLattice, G: BuildingSet, X: int, M: int) -> RestrictionQuotientIso:
    """The isomorphism (X-perp, A/X) = (V/M-perp, A|_M) and its lattice bijection."""
    if L.dims[X] + L.dims[M] != L.dims[L.top] or L.join(X, M) != L.top:
        raise NotAComplement("V* is not the direct sum of X and M", X=L.describe(X), M=L.describe(M))
    A = L.A
    qX = quotient_lattice(L, X)  # A/X
    rM = restricted_lattice(L, M)  # A|_M
    XF, MF = L.flats[X], L.flats[M]
    free = [c for c in range(A.dim) if c not in set(XF.pivots)]
    one, zero = A.one(), A.zero()
    cols = []
    for c in free:
        e = [one if k == c else zero for k in range(A.dim)]
        cols.append(MF.coordinates(m_component(L, X, M, e)))
    matrix = [[cols[j][i] for j in range(len(free))] for i in range(L.dims[M])]
    # hyperplanes: map each covector of A/X through the matrix
    hyp_map = {}
    for j, w in enumerate(qX.A.covectors):
        img = [sum((matrix[i][k] * w[k] for k in range(len(w))), zero) for i in range(len(matrix))]
        idx = rM.A.index_of(img)
        if idx is None:
            raise InternalError("image of a hyperplane of A/X is not in A|_M")
        hyp_map[j] = idx
    if sorted(hyp_map.values()) != list(range(len(rM.A))):
        raise InternalError("hyperplane map is not a bijection")
    # flats: (Y+X)/X -> (Y+X) cap M
    flat_map = {}
    for Y in L:
        src = qX.translate[Y]
        Z = L.meet(L.join(Y, X), M)
        if Z is None:
            raise InternalError("(Y+X) cap M is not a flat; M is not modular")
        tgt = rM.translate[Z]
        if flat_map.setdefault(src, tgt) != tgt:
            raise InternalError("flat bijection is not well defined")
        # consistency with the linear map on hyperplanes
        expect = rM.L.flat_of_hyps(hyp_map[j] for j in qX.L.hyps[src])
        if expect != tgt:
            raise InternalError("lattice bijection disagrees with the linear isomorphism")
    if len(flat_map) != len(qX.L) or len(set(flat_map.values())) != len(rM.L):
        raise InternalError("lattice map is not a bijection")
    for a in flat_map:
        for b in flat_map:
            if qX.L.leq(a, b) != rM.L.leq(flat_map[a], flat_map[b]):
                raise InternalError("lattice bijection is not an order isomorphism")
    if M != L.bottom and X in G and M in G:
        GX = {qX.translate[Y] for Y in G} - {qX.L.bottom}
        GM = {rM.translate[Y] for Y in G if L.leq(Y, M)}
        if {flat_map[g] for g in GX} != GM:
            raise InternalError("image of G/X is not G|_M")
    return RestrictionQuotientIso(matrix, hyp_map, flat_map, qX, rM)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------
@dataclass
class ModularityReport:
    modular_by_codim: dict[int, list[int]]
    g_modular: list[int]
    has_enough_modular: bool
    has_enough_g_modular: bool
    supersolvable_chain: list[int] | None
    unavoidable_hyperplanes: dict[int, list[int]] = field(default_factory=dict)
    witnesses: dict[int, tuple[int, Flat]] = field(default_factory=dict)


def modularity_report(L: IntersectionLattice, G: BuildingSet | None = None) -> ModularityReport:
    if G is None:
        G = irreducible_building_set(L)
    mods = modular_flats(L)
    top = L.dims[L.top]
    by_codim: dict[int, list[int]] = {}
    for M in mods:
        by_codim.setdefault(top - L.dims[M], []).append(M)
    enough, failing = _enough(L, _codim1(L, mods))
    g_mods = g_modular_flats(L, G)
    enough_g = _enough(L, _codim1(L, g_mods))[0]
    witnesses = {}
    for X in L:
        ok, Y = is_modular(L, X)
        if not ok:
            witnesses[X] = (Y, L.flats[X] & L.flats[Y])
    return ModularityReport(by_codim, g_mods, enough, enough_g, is_supersolvable(L), failing, witnesses)


def _sum_building(L1: IntersectionLattice, G1: BuildingSet, L2: IntersectionLattice, G2: BuildingSet,
                  LS: IntersectionLattice) -> BuildingSet:
    off = len(L1.A)
    els = {LS.flat_of_hyps(L1.hyps[g]) for g in G1} | {LS.flat_of_hyps(h + off for h in L2.hyps[g]) for g in G2}
    return BuildingSet(LS, els)


def preservation_suite(L: IntersectionLattice, G: BuildingSet,
                       partners: list[Arrangement] | None = None) -> dict[str, bool]:
    """Check that enough G-modular elements pass to restrictions, quotients, sums and the cone."""
    out: dict[str, bool] = {}
    for X in G:
        GX, sub = building_restrict(G, X)
        out["restrict %s" % L.describe(X)] = has_enough_g_modular(sub.L, GX)
        if X != L.top:
            GQ, subq = building_quotient(G, X)
            out["quotient %s" % L.describe(X)] = has_enough_g_modular(subq.L, GQ)
    for B in partners or []:
        LB = build_lattice(B)
        GB = irreducible_building_set(LB)
        if not has_enough_g_modular(LB, GB):
            continue
        LS = build_lattice(direct_sum(L.A, B))
        GS = _sum_building(L, G, LB, GB, LS)
        if not is_building_set(GS):
            raise InternalError("disjoint union of building sets is not a building set")
        out["sum with %s" % (B.name or repr(B))] = has_enough_g_modular(LS, GS)
    GC, LC = cone_building(G)
    out["cone"] = has_enough_g_modular(LC, GC)
    return out
