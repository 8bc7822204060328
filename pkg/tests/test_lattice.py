import time
from itertools import combinations

import pytest
from hypothesis import given

from hyperarr.arrangement import Flat, builtin
from hyperarr.errors import NotABuildingSet
from hyperarr.lattice import (
    BuildingSet,
    build_lattice,
    building_quotient,
    building_restrict,
    building_sets_brute_force,
    cone_building,
    full_building_set,
    g_decomposition,
    irreducible_building_set,
    irreducible_decomposition,
    irreducibles,
    is_building_set,
    lattice_by_subsets,
    minimal_building_set,
)
from hyperarr.linalg import rank

from strategies import arrangements


def components(A, hyps):
    """Oracle: connected components of the matroid on ``hyps`` (elements of a common circuit are joined)."""
    hyps = sorted(hyps)
    parent = {h: h for h in hyps}

    def find(h):
        while parent[h] != h:
            h = parent[h]
        return h

    vecs = {h: list(A.covectors[h]) for h in hyps}
    for r in range(2, len(hyps) + 1):
        for C in combinations(hyps, r):
            if rank([vecs[h] for h in C]) == r - 1 and all(
                rank([vecs[h] for h in C if h != g]) == r - 1 for g in C
            ):
                for h in C[1:]:
                    parent[find(h)] = find(C[0])
    return len({find(h) for h in hyps})


def flat_by_name(L, name):
    (i,) = [i for i in L if L.describe(i) == name]
    return i


@given(arrangements())
def test_lattice_matches_subset_enumeration(A):
    L = build_lattice(A)
    assert set(L.flats) == lattice_by_subsets(A)
    assert L.dims[L.bottom] == 0
    # join is the span, order is inclusion
    for i in L:
        for j in L:
            assert L.leq(i, j) == L.flats[i].issubset(L.flats[j])


@given(arrangements())
def test_irreducibles_match_matroid_connectivity(A):
    L = build_lattice(A)
    oracle = {i for i in L.nonzero() if components(A, L.hyps[i]) == 1}
    assert set(irreducibles(L)) == oracle


@given(arrangements())
def test_irreducible_decomposition_is_a_direct_sum(A):
    L = build_lattice(A)
    for X in L.nonzero():
        parts = irreducible_decomposition(L, X)
        assert all(p in irreducibles(L) for p in parts)
        assert sum(L.dims[p] for p in parts) == L.dims[X]
        assert L.join_all(parts) == X
        assert len(parts) == components(A, L.hyps[X])


def test_covers_are_rank_one_steps():
    L = build_lattice(builtin("braid", [3]))
    # L(braid) is the partition lattice of 4 elements: 15 flats
    assert len(L) == 15
    for i, j in L.covers:
        assert L.dims[j] == L.dims[i] + 1 and L.lt(i, j)


def test_ex_irred_irreducibles():
    start = time.perf_counter()
    L = build_lattice(builtin("ex_irred"))
    F = irreducibles(L)
    dim2 = {L.describe(i) for i in F if L.dims[i] == 2}
    assert dim2 == {"<x1, x2>", "<x1, x3>"}
    assert L.top in F
    assert time.perf_counter() - start < 1


def test_irreducibles_do_not_pass_to_quotients():
    L = build_lattice(builtin("ex_irred"))
    F = irreducible_building_set(L)
    x = flat_by_name(L, "<x1>")
    GX, sub = building_quotient(F, x)
    assert irreducibles(sub.L) < GX.elements
    assert is_building_set(GX)


@given(arrangements(max_lines=5))
def test_building_set_brute_force(A):
    L = build_lattice(A)
    all_sets = building_sets_brute_force(L)
    F = irreducibles(L)
    assert F in all_sets and frozenset(L.nonzero()) in all_sets
    assert min(all_sets, key=len) == F
    for G in all_sets:
        B = BuildingSet(L, G)
        for X in L.nonzero():
            parts = g_decomposition(B, X)
            assert L.join_all(parts) == X and sum(L.dims[p] for p in parts) == L.dims[X]


def test_minimal_building_set_closure():
    L = build_lattice(builtin("ex_irred"))
    y = flat_by_name(L, "<x2>")
    z = flat_by_name(L, "<x3>")
    yz = L.join(y, z)
    G = minimal_building_set(L, [yz])
    assert yz in G and is_building_set(G)
    brute = building_sets_brute_force(L)
    assert G.elements in brute
    # minimality: every building set containing <x2, x3> contains G
    assert all(G.elements <= B for B in brute if yz in B)


def test_non_building_set_is_detected():
    L = build_lattice(builtin("ex_irred"))
    F = irreducibles(L)
    with pytest.raises(NotABuildingSet):
        BuildingSet(L, F | {L.bottom})
    assert not is_building_set(BuildingSet(L, F - {L.top}))


@pytest.mark.parametrize("spec", [("ex_irred", []), ("braid", [3]), ("monomial", [2, 1])])
def test_restriction_and_quotient_of_building_sets(spec):
    L = build_lattice(builtin(*spec))
    for G in (irreducible_building_set(L), full_building_set(L)):
        for X in G:
            GX, sub = building_restrict(G, X)
            assert is_building_set(GX)
            assert len(GX) == sum(1 for Y in G if L.leq(Y, X))
            if X != L.top:
                GQ, subq = building_quotient(G, X)
                assert is_building_set(GQ)


def test_cone_building_set():
    L = build_lattice(builtin("ex_ss_not_enough"))
    GC, LC = cone_building(irreducible_building_set(L))
    assert is_building_set(GC)
    assert len(LC.A) == len(L.A) + 1


def test_span_caches_agree_with_fresh_rank():
    A = builtin("ex_only_one_modular")
    L = build_lattice(A)
    for i, j in combinations(range(len(A)), 2):
        X = L.flat_of_hyps([i, j])
        assert L.flats[X] == Flat(A.dim, [A.covectors[i], A.covectors[j]])
