import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperarr.arrangement import builtin
from hyperarr.bar import (
    OS2,
    _check_dL,
    _shuffle_words,
    antipode,
    bar_basis_dual,
    bar_basis_kernel,
    counit,
    deconcat,
    in_bar,
    shuffle,
    truncated_solution,
)
from hyperarr.errors import ValidationError
from hyperarr.holonomy import holonomy_degree
from hyperarr.lattice import build_lattice
from hyperarr.linalg import same_span, sparse_add

from strategies import arrangements

CATALOG = [("p1", [0, 1, "inf"]), ("monomial", [1, 2]), ("braid", [3]), ("ex_irred", []),
           ("ex_ss_not_enough", []), ("ex_only_one_modular", [])]

words = st.lists(st.integers(0, 2), max_size=4).map(tuple)
elements = st.dictionaries(words, st.integers(-3, 3).filter(bool).map(Fraction), max_size=4)


def tensor(x, y):
    out = {}
    for u, a in x.items():
        for v, b in y.items():
            out = sparse_add(out, {(u, v): Fraction(1)}, a * b)
    return out


def coproduct_of_pairs(pairs):
    """(Delta (x) 1) applied to a sum of u (x) v."""
    out = {}
    for (u, v), c in pairs.items():
        for (a, b), d in deconcat({u: Fraction(1)}).items():
            out = sparse_add(out, {(a, b, v): Fraction(1)}, c * d)
    return out


def random_combination(basis, rng):
    out = {}
    for b in basis:
        out = sparse_add(out, b, Fraction(rng.randint(-3, 3)))
    return out


@pytest.mark.parametrize("spec", CATALOG)
def test_os2_dimension_is_the_second_betti_number(spec):
    L = build_lattice(builtin(*spec))
    n = len(L.A)
    b2 = sum(len(L.hyps[X]) - 1 for X in L.of_dim(2))
    assert n * (n - 1) // 2 - len(OS2(L).rel) == b2


@pytest.mark.parametrize("spec", CATALOG)
def test_kohno_duality(spec):
    L = build_lattice(builtin(*spec))
    N = 3 if len(L.A) <= 6 else 2
    for n in range(1, N + 1):
        dual = bar_basis_dual(L, n)
        kernel = bar_basis_kernel(L, n)
        assert len(dual) == len(kernel) == holonomy_degree(L, n).dim
        assert same_span(dual, kernel)


def test_three_points_on_the_line():
    L = build_lattice(builtin("p1", [0, 1, "inf"]))
    assert [len(bar_basis_kernel(L, n)) for n in (1, 2, 3)] == [2, 4, 8]


def test_choice_of_h0_does_not_change_dimensions():
    L = build_lattice(builtin("ex_irred"))
    dims = {h0: len(bar_basis_kernel(L, 2, h0)) for h0 in range(len(L.A))}
    assert set(dims.values()) == {holonomy_degree(L, 2).dim}


@pytest.mark.parametrize("spec", [("braid", [3]), ("ex_irred", [])])
def test_shuffle_closure(spec):
    L = build_lattice(builtin(*spec))
    rng = random.Random(11)
    B1, B2 = bar_basis_kernel(L, 1), bar_basis_kernel(L, 2)
    B3 = bar_basis_dual(L, 3)
    for _ in range(5):
        x, y = random_combination(B1, rng), random_combination(B2, rng)
        s = shuffle(x, y)
        assert in_bar(L, s)
        assert same_span(B3, B3 + [s])
    # a generic word is not integrable
    assert not all(in_bar(L, {w: Fraction(1)}) for w in [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2)])


@given(arrangements(max_lines=5), st.data())
def test_shuffles_of_integrable_words_are_integrable(A, data):
    L = build_lattice(A)
    B1, B2 = bar_basis_kernel(L, 1), bar_basis_kernel(L, 2)

    def combination(basis):
        cs = data.draw(st.lists(st.integers(-2, 2), min_size=len(basis), max_size=len(basis)))
        out = {}
        for c, b in zip(cs, basis):
            out = sparse_add(out, b, Fraction(c))
        return out

    x = combination(B1)
    assert in_bar(L, shuffle(x, combination(B1)))
    if B2:
        assert in_bar(L, shuffle(x, combination(B2)))


@pytest.mark.parametrize("spec", [("braid", [3]), ("ex_ss_not_enough", [])])
def test_deconcatenation_closure(spec):
    L = build_lattice(builtin(*spec))
    rng = random.Random(5)
    x = random_combination(bar_basis_kernel(L, 3), rng)
    for k in (1, 2):
        slices = {}
        for (u, v), c in deconcat(x).items():
            if len(u) == k:
                slices.setdefault(v, {})[u] = c
        assert all(in_bar(L, s) for s in slices.values())


def test_in_bar_rejects_bad_input():
    L = build_lattice(builtin("ex_irred"))
    h0 = len(L.A) - 1
    with pytest.raises(ValidationError):
        in_bar(L, {(h0, 0): Fraction(1)})
    with pytest.raises(ValidationError):
        in_bar(L, {(0,): Fraction(1), (0, 1): Fraction(1)})


@given(elements)
def test_coassociativity_and_counit(x):
    D = deconcat(x)
    left = coproduct_of_pairs(D)
    right = {}
    for (u, v), c in D.items():
        for (a, b), d in deconcat({v: Fraction(1)}).items():
            right = sparse_add(right, {(u, a, b): Fraction(1)}, c * d)
    assert left == right
    # (eps (x) 1) Delta = id = (1 (x) eps) Delta
    assert {v: c for (u, v), c in D.items() if u == ()} == {w: c for w, c in x.items() if c}
    assert {u: c for (u, v), c in D.items() if v == ()} == {w: c for w, c in x.items() if c}


@given(elements)
def test_antipode_convolution(x):
    # m (S (x) 1) Delta = eps 1
    total = {}
    for (u, v), c in deconcat(x).items():
        total = sparse_add(total, shuffle(antipode({u: Fraction(1)}), {v: Fraction(1)}), c)
    eps = counit(x)
    assert total == ({(): eps} if eps else {})


@given(elements, elements)
def test_coproduct_is_a_shuffle_morphism(x, y):
    lhs = deconcat(shuffle(x, y))
    rhs = {}
    for (a, b), c in deconcat(x).items():
        for (p, q), d in deconcat(y).items():
            for u, m in _shuffle_words(a, p).items():
                for v, n in _shuffle_words(b, q).items():
                    rhs = sparse_add(rhs, {(u, v): Fraction(1)}, c * d * m * n)
    assert lhs == rhs


def test_shuffle_counts():
    # |u sh v| = binomial(|u| + |v|, |u|) with multiplicity
    assert sum(_shuffle_words((0, 1), (2, 3, 4)).values()) == 10
    assert shuffle({(0,): Fraction(1)}, {(0,): Fraction(1)}) == {(0, 0): Fraction(2)}


@pytest.mark.parametrize("spec", CATALOG)
def test_truncated_solution_identities(spec):
    L = build_lattice(builtin(*spec))
    N = 3 if len(L.A) <= 6 else 2
    sol = truncated_solution(L, N)
    assert sol.checks == {"dL=Omega*L": True, "Delta(L)=L(x)L": True}
    assert [sol.coefficient_count(n) for n in range(1, N + 1)] == [holonomy_degree(L, n).dim for n in range(1, N + 1)]


def test_corrupted_solution_fails_dL():
    L = build_lattice(builtin("braid", [3]))
    sol = truncated_solution(L, 2)
    key = next(iter(sol.parts[2]))
    sol.parts[2][key] += 1
    assert not _check_dL(sol, 2)
