from fractions import Fraction
from itertools import product

import pytest

from hyperarr.arrangement import builtin
from hyperarr.errors import RelationNotPreserved, ValidationError
from hyperarr.holonomy import (
    GeneratorMap,
    _check_relations,
    boundary_embeddings,
    factors_commute,
    holonomy_degree,
    is_group_like,
    letter,
    monodromy_factor,
    t_add,
    t_flat,
    FormalSeries,
)
from hyperarr.lattice import build_lattice, irreducible_building_set, restricted_lattice
from hyperarr.modularity import is_supersolvable
from hyperarr.nested import adapted_bases, maximal_nested_sets

SUPERSOLVABLE = [("p1", [0, 1, "inf"]), ("monomial", [1, 2]), ("braid", [3]), ("ex_irred", []),
                 ("ex_ss_not_enough", []), ("ex_pred3", [])]


def lcs_dims(L, N):
    """Oracle for fiber-type arrangements: A = U(g)/(central t_V*) has Hilbert series prod_{i>=2} 1/(1 - e_i t)."""
    chain = is_supersolvable(L)
    assert chain is not None
    sizes = [len(L.hyps[c]) for c in chain]
    exps = [b - a for a, b in zip(sizes, sizes[1:])]
    assert exps[0] == 1
    series = [1] + [0] * N
    for e in exps[1:]:
        # multiply by 1/(1 - e t)
        for n in range(1, N + 1):
            series[n] += e * series[n - 1]
    return series


@pytest.mark.parametrize("spec", SUPERSOLVABLE)
def test_dimensions_match_the_lcs_formula(spec):
    L = build_lattice(builtin(*spec))
    N = 3 if len(L.A) <= 6 else 2
    assert [holonomy_degree(L, n).dim for n in range(N + 1)] == lcs_dims(L, N)


def test_known_dimensions():
    L = build_lattice(builtin("braid", [3]))
    assert [holonomy_degree(L, n).dim for n in range(4)] == [1, 5, 19, 65]


def test_normal_form_is_a_projection():
    L = build_lattice(builtin("ex_irred"))
    H = holonomy_degree(L, 2)
    v = {(0, 1): Fraction(3), (4, 2): Fraction(-1), (1, 0): Fraction(2)}
    nf = H.normal_form(v)
    assert H.normal_form(nf) == nf
    assert H.contains(t_add(v, nf, -1))
    assert set(nf) <= set(H.standard)
    with pytest.raises(ValidationError):
        H.normal_form({(0,): Fraction(1)})


def embeddings_cases():
    for spec in [("monomial", [1, 2]), ("braid", [3]), ("ex_irred", []), ("ex_pred3", [])]:
        L = build_lattice(builtin(*spec))
        G = irreducible_building_set(L).with_top()
        for S in maximal_nested_sets(G):
            beta = adapted_bases(S)[0]
            for X in S:
                if X != L.top:
                    yield spec, S, X, beta


def test_boundary_embeddings_everywhere():
    count = 0
    for spec, S, X, beta in embeddings_cases():
        E = boundary_embeddings(S, X, beta, n=2)
        L = S.L
        # independent left-inverse check on every degree-2 word of the quotient
        Hq = holonomy_degree(E.quotient.L, 2)
        for w in product(range(len(E.quotient.A)), repeat=2):
            v = {w: Fraction(1)}
            assert Hq.normal_form(E.j.apply(E.i2.apply(v))) == Hq.normal_form(v)
        # i1 sends t_X (sum over the restricted letters) to zero in A_1
        tX = {(k,): Fraction(1) for k in range(len(E.restricted.A))}
        assert holonomy_degree(L, 1).contains(E.i1.apply(tX))
        count += 1
    assert count > 20


def test_naive_i1_is_not_a_morphism():
    # dropping the correction term of t_beta(X) breaks sum t_H -> relations
    L = build_lattice(builtin("braid", [3]))
    G = irreducible_building_set(L).with_top()
    S = next(T for T in maximal_nested_sets(G) if any(L.dims[Y] == 2 for Y in T))
    X = next(Y for Y in S if L.dims[Y] == 2)
    rX = restricted_lattice(L, X)
    naive = GeneratorMap({j: letter(fib[0]) for j, fib in enumerate(rX.A.provenance.fibers)})
    with pytest.raises(RelationNotPreserved):
        _check_relations(naive, rX.L, L, "naive i1")


def test_monodromy_factor():
    L = build_lattice(builtin("braid", [3]))
    G = irreducible_building_set(L).with_top()
    S = maximal_nested_sets(G)[0]
    X, Y = [Z for Z in S if Z != L.top][:2]
    one = monodromy_factor(L, X, 1)
    assert one.parts[0] == {(): Fraction(1)}
    assert one.parts[1] == holonomy_degree(L, 1).normal_form(t_flat(L, X))
    series = monodromy_factor(L, X, 3)
    assert is_group_like(series)
    # members of a nested set give commuting monodromies
    assert factors_commute(L, X, Y, 3)


def test_non_group_like_series_is_detected():
    L = build_lattice(builtin("p1", [0, 1, "inf"]))
    H1 = holonomy_degree(L, 1)
    t0 = H1.normal_form(letter(0))
    # 1 + t0 + 0 * t0^2 is not group-like in degree 2
    bad = FormalSeries(L, {0: {(): Fraction(1)}, 1: t0, 2: {}})
    assert not is_group_like(bad)
    assert is_group_like(monodromy_factor(L, L.line_index[0], 2))
