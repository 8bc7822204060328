from itertools import product

import pytest
from hypothesis import given

from hyperarr.arrangement import builtin
from hyperarr.lattice import build_lattice, full_building_set, irreducible_building_set
from hyperarr.linalg import rank
from hyperarr.nested import (
    NestedSet,
    adapted_bases,
    adjacent,
    brute_force_maximal_nested,
    is_adapted_basis,
    is_nested,
    maximal_nested_sets,
    nested_quotient,
    nested_restrict,
    p_in_S,
    predecessors,
    successor,
)

from strategies import arrangements

CATALOG = [("ex_irred", []), ("ex_ss_not_enough", []), ("braid", [3]), ("monomial", [1, 2]), ("monomial", [2, 1])]


def brute_adapted(S):
    """Oracle: every assignment Y -> hyperplane in Y whose restriction to each member is a basis."""
    L, A = S.L, S.L.A
    out = []
    keys = list(S)
    for choice in product(*(sorted(L.hyps[Y]) for Y in keys)):
        beta = dict(zip(keys, choice))
        ok = True
        for Y in keys:
            below = [beta[Z] for Z in keys if L.leq(Z, Y)]
            if len(below) != L.dims[Y] or rank([A.covectors[h] for h in below]) != L.dims[Y]:
                ok = False
                break
        if ok:
            out.append(beta)
    return out


@given(arrangements(max_lines=5))
def test_maximal_nested_sets_match_brute_force(A):
    L = build_lattice(A)
    for G in (irreducible_building_set(L).with_top(), full_building_set(L)):
        fast = {frozenset(S.elements) for S in maximal_nested_sets(G)}
        assert fast == set(brute_force_maximal_nested(G))
        for S in fast:
            assert len(S) == L.dims[L.top]


@pytest.mark.parametrize("spec", CATALOG)
def test_adapted_bases_match_brute_force(spec):
    L = build_lattice(builtin(*spec))
    G = irreducible_building_set(L).with_top()
    for S in maximal_nested_sets(G):
        fast = adapted_bases(S)
        assert sorted(map(sorted, (b.items() for b in fast))) == sorted(map(sorted, (b.items() for b in brute_adapted(S))))
        for beta in fast:
            assert is_adapted_basis(S, beta)
            for Y in S:
                assert p_in_S(L.A.covectors[beta[Y]], S) == Y


def test_braid_nested_set_count():
    # charts of the minimal model of braid(3) <-> rooted binary trees on 4 labelled leaves: 5!! = 15
    L = build_lattice(builtin("braid", [3]))
    assert len(maximal_nested_sets(irreducible_building_set(L).with_top())) == 15


@pytest.mark.parametrize("spec", CATALOG)
def test_nested_sets_restrict_and_quotient(spec):
    L = build_lattice(builtin(*spec))
    G = irreducible_building_set(L).with_top()
    for S in maximal_nested_sets(G):
        for X in S:
            R = nested_restrict(S, X)
            assert len(R.S) == L.dims[X]
            if X != L.top:
                Q = nested_quotient(S, X)
                assert len(Q.S) == L.dims[L.top] - L.dims[X]


def test_adjacency_flips_one_element():
    L = build_lattice(builtin("monomial", [1, 2]))
    sets = maximal_nested_sets(irreducible_building_set(L).with_top())
    # rank 2: every nested set is {line, V*}; all are mutually adjacent
    assert len(sets) == 4
    assert all(adjacent(S, T) for S in sets for T in sets if S != T)


def test_ex_pred3_has_three_predecessors_of_the_top():
    L = build_lattice(builtin("ex_pred3"))
    G = irreducible_building_set(L).with_top()
    names = ["<x1>", "<x2>", "<x3>"]
    idx = [i for n in names for i in L if L.describe(i) == n]
    S = NestedSet.of(G, idx + [L.top])
    assert any(set(T.elements) == set(S.elements) for T in maximal_nested_sets(G))
    assert len(predecessors(S, L.top)) == 3
    assert all(successor(Y, S) == L.top for Y in idx)


def test_non_nested_family():
    L = build_lattice(builtin("ex_irred"))
    G = irreducible_building_set(L).with_top()
    x, y = [i for i in L if L.describe(i) in ("<x1>", "<x2>")]
    # <x1> + <x2> = <x1, x2> is irreducible, so {<x1>, <x2>} is not nested
    assert not is_nested([x, y], G)
