import random
from fractions import Fraction

import pytest

from hyperarr.arrangement import builtin
from hyperarr.charts import (
    CoordinateMap,
    boundary_restriction,
    find_M_adapted,
    is_M_adapted,
    laurent_coefficients,
    make_chart,
    regular_function,
    retraction_maps,
)
from hyperarr.errors import NotAdapted, NotEnoughGModular, PoleOrderExceeded, ValidationError
from hyperarr.lattice import build_lattice, irreducible_building_set
from hyperarr.linalg import solve_in_span
from hyperarr.modularity import modular_complement
from hyperarr.nested import adapted_bases, maximal_nested_sets
from hyperarr.poly import Poly, RationalFunction

MODULAR = [("braid", [3]), ("monomial", [1, 2]), ("monomial", [1, 3]), ("p1", [0, 1, "inf"])]
ALL = MODULAR + [("ex_irred", []), ("ex_pred3", []), ("ex_ss_not_enough", [])]


def charts_of(spec, every_basis=False):
    L = build_lattice(builtin(*spec))
    G = irreducible_building_set(L).with_top()
    for S in maximal_nested_sets(G):
        bases = adapted_bases(S)
        for beta in bases if every_basis else bases[:1]:
            yield G, S, make_chart(S, beta)


def point_of_chart(chart, u):
    """Oracle: the point of V whose beta(Y)-values are prod_{Z >= Y, Z != V*} u_Z, by a linear solve."""
    L = chart.L
    values = []
    rows = []
    for Y in chart.S:
        val = Fraction(1)
        for Z in chart.coords:
            if L.leq(Y, Z):
                val *= u[chart.var[Z]]
        values.append(val)
        rows.append(list(chart.basis[Y]))
    # the point p solves rows . p = values; transpose to use the span solver on columns
    n = len(rows)
    cols = [[rows[i][j] for i in range(n)] for j in range(n)]
    return solve_in_span(cols, values)


@pytest.mark.parametrize("spec", ALL)
def test_chart_polynomials_against_a_linear_solve(spec):
    rng = random.Random(7)
    for _, S, chart in charts_of(spec, every_basis=True):
        u = [Fraction(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(chart.nvars)]
        p = point_of_chart(chart, u)
        for h, cv in enumerate(chart.A.covectors):
            direct = sum(a * b for a, b in zip(cv, p))
            f = chart.forms[h]
            mono = Fraction(1)
            for i, e in enumerate(f.monomial):
                mono *= u[i] ** e
            assert direct == mono * f.P.evaluate(u)
            assert f.P.constant_term() != 0
            assert chart.pullback(cv) == Poly.monomial(chart.nvars, f.monomial) * f.P


@pytest.mark.parametrize("spec", ALL)
def test_adapted_basis_lines_have_trivial_polynomial(spec):
    for _, S, chart in charts_of(spec):
        for Y in S:
            assert chart.forms[chart.beta[Y]].P == 1


def test_non_adapted_basis_is_rejected():
    L = build_lattice(builtin("monomial", [1, 2]))
    G = irreducible_building_set(L).with_top()
    S = maximal_nested_sets(G)[0]
    beta = adapted_bases(S)[0]
    bad = dict(beta)
    bad[L.top] = beta[S.elements[0]]
    with pytest.raises(NotAdapted):
        make_chart(S, bad)


def test_ex_pred3_chart_has_no_retraction():
    L = build_lattice(builtin("ex_pred3"))
    G = irreducible_building_set(L).with_top()
    S = maximal_nested_sets(G)[0]
    X = S.elements[0]
    with pytest.raises(NotEnoughGModular):
        retraction_maps(G, S, X)
    with pytest.raises(ValidationError):
        retraction_maps(G, S, L.top)


@pytest.mark.parametrize("spec", ALL)
def test_boundary_identities(spec):
    for _, S, chart in charts_of(spec):
        for X in S:
            B = boundary_restriction(chart, X)
            n_quot = B.quotient.nvars if B.quotient else 0
            assert B.restricted.nvars + n_quot == chart.nvars - (X != chart.L.top)
            # f o inclusion is the identity of the product chart
            assert B.f.compose(B.inclusion).is_identity()


@pytest.mark.parametrize("spec", MODULAR)
def test_retractions(spec):
    for G, S, chart in charts_of(spec):
        L = chart.L
        for X in S:
            if X == L.top:
                continue
            R = retraction_maps(G, S, X)
            M = modular_complement(L, G, X)
            assert R.M == M and is_M_adapted(S, R.chart.beta, X, M)
            pi = CoordinateMap(R.chart.names(), R.boundary.product_names, R.pi1.images + R.pi2.images)
            assert pi.compose(R.boundary.inclusion).is_identity()
            # pi1, pi2 are coordinate projections: each image is a single chart coordinate
            for img in pi.images:
                assert len(img.terms) == 1 and sum(next(iter(img.terms))) == 1
            assert find_M_adapted(S, X, M) is not None


def test_laurent_coefficients_reconstruct_the_function():
    G, S, chart = next(charts_of(("braid", [3])))
    X = chart.coords[0]
    i = chart.var[X]
    n = chart.nvars
    Ph = next(h for h in range(len(chart.A)) if not chart.forms[h].P.is_constant())
    num = Poly.const(n, Fraction(1)) + Poly.var(n, (i + 1) % n)
    f = regular_function(chart, num, {Ph: 2}, {X: 2})
    N, upto = 2, 3
    coeffs = laurent_coefficients(chart, f, X, N, upto)
    assert [k for k, _ in coeffs] == list(range(-N, upto + 1))
    rng = random.Random(3)
    base = [Fraction(rng.randint(1, 5), 7) for _ in range(n)]
    errs = []
    for eps in (Fraction(1, 10 ** 3), Fraction(1, 10 ** 4)):
        pt = list(base)
        pt[i] = eps
        approx = sum(c.evaluate(pt) * eps ** k for k, c in coeffs)
        errs.append(abs(f.evaluate(pt) - approx))
    # the remainder is O(eps^(upto+1))
    assert errs[1] < errs[0] / 10 ** (upto + 1) * 20
    assert errs[0] < Fraction(1, 10 ** 9)


def test_laurent_pole_order_is_enforced():
    G, S, chart = next(charts_of(("braid", [3])))
    X = chart.coords[0]
    f = regular_function(chart, Poly.const(chart.nvars, Fraction(1)), u_powers={X: 3})
    with pytest.raises(PoleOrderExceeded):
        laurent_coefficients(chart, f, X, 2)
    zero = RationalFunction(Poly(chart.nvars))
    assert all(not c.num.terms for _, c in laurent_coefficients(chart, zero, X, 1))
