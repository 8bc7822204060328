from fractions import Fraction

import pytest

from hyperarr.arrangement import builtin
from hyperarr.charts import make_chart
from hyperarr.connection import (
    Primitive,
    differential,
    differential_equals,
    line_points,
    omega_chart,
    partial_fractions,
    primitive_1d,
    verify_boundary_omega,
    wedge_square_vanishes,
)
from hyperarr.errors import PoleOutsideArrangement, ValidationError
from hyperarr.holonomy import t_flat
from hyperarr.lattice import build_lattice, irreducible_building_set
from hyperarr.nested import NestedSet, adapted_bases, maximal_nested_sets
from hyperarr.poly import Poly, RationalFunction

SPECS = [("braid", [3]), ("monomial", [1, 2]), ("monomial", [2, 1]), ("p1", [0, 1, "inf"]),
         ("ex_irred", []), ("ex_pred3", []), ("ex_ss_not_enough", [])]


def setup(spec):
    L = build_lattice(builtin(*spec))
    return L, irreducible_building_set(L).with_top()


def t(*coeffs) -> RationalFunction:
    """Polynomial in one variable from its coefficients, as a rational function."""
    return RationalFunction(Poly(1, {(k,): Fraction(c) for k, c in enumerate(coeffs) if c}))


@pytest.mark.parametrize("spec", SPECS)
def test_omega_term_count_and_coefficients(spec):
    L, G = setup(spec)
    for S in maximal_nested_sets(G):
        chart = make_chart(S, adapted_bases(S)[0])
        om = omega_chart(chart)
        nonconstant = sum(1 for f in chart.forms.values() if not f.P.is_constant())
        assert om.term_count() == len(S) - 1 + nonconstant
        assert om.integrable
        for term in om.terms:
            if term.kind == "u":
                assert term.coefficient == t_flat(L, term.label)


def test_omega_on_the_three_predecessor_chart():
    L, G = setup(("ex_pred3", []))
    idx = [i for n in ("<x1>", "<x2>", "<x3>") for i in L if L.describe(i) == n]
    S = NestedSet.of(G, idx + [L.top])
    chart = make_chart(S, adapted_bases(S)[0])
    om = omega_chart(chart)
    assert om.integrable
    assert sorted(term.label for term in om.terms if term.kind == "u") == sorted(idx)
    assert wedge_square_vanishes(chart, om.terms)
    js = om.to_json()
    assert js["integrable"] is True and len(js["terms"]) == om.term_count()


@pytest.mark.parametrize("spec", SPECS)
def test_boundary_restriction_of_omega(spec):
    L, G = setup(spec)
    for S in maximal_nested_sets(G):
        for X in S:
            res = verify_boundary_omega(G, S, X)
            assert res.ok, res.diff
            assert res.i2_on_S


def test_line_points():
    assert line_points(builtin("p1", [0, 1, "inf"])) == [0, 1, "inf"]
    with pytest.raises(ValidationError):
        line_points(builtin("braid", [3]))


def test_partial_fractions_reconstructs():
    # (t^3 + 2) / (t^2 (t - 1)) = 1 + 3/(t-1) - 2/t - 2/t^2
    f = t(2, 0, 0, 1) / (t(0, 0, 1) * t(-1, 1))
    poly, principal = partial_fractions(f, [Fraction(0), Fraction(1)])
    assert principal == {(0, 1): -2, (0, 2): -2, (1, 1): 3}
    assert poly == Poly.const(1, Fraction(1))
    rebuilt = RationalFunction(poly)
    for (a, k), c in principal.items():
        rebuilt = rebuilt + t(c) / RationalFunction(t(-a, 1).num ** k)
    assert rebuilt == f


def test_partial_fractions_rejects_foreign_poles():
    with pytest.raises(PoleOutsideArrangement):
        partial_fractions(t(1) / t(-2, 1), [Fraction(0), Fraction(1)])


def test_primitives_on_the_line():
    A = builtin("p1", [0, 1, "inf"])
    # dt/t integrates to the letter of 0
    G = primitive_1d({(): t(1) / t(0, 1)}, A)
    assert {w: g for w, g in G.terms.items()} == {(0,): t(1)}
    # dt/(1 - t) (x) [0] = -omega_1 (x) [0]
    G = primitive_1d({(0,): t(-1) / t(-1, 1)}, A)
    assert G.terms == {(1, 0): t(-1)}
    # t dt integrates to t^2 / 2
    G = primitive_1d({(): t(0, 1)}, A)
    assert G.terms == {(): t(0, 0, Fraction(1, 2))}
    assert G.weight == 0


def test_primitive_with_mixed_terms():
    A = builtin("p1", [0, 1, "inf"])
    F = {(1,): t(1) / t(0, 0, 1), (0, 1): t(3, 1) / (t(0, 1) * t(-1, 1))}
    G = primitive_1d(F, A)
    assert differential_equals(G, F)
    assert G.weight <= 3


def test_primitive_rejects_poles_outside_the_points():
    A = builtin("p1", [0, 1, "inf"])
    with pytest.raises(PoleOutsideArrangement):
        primitive_1d({(): t(1) / t(-2, 1)}, A)
    with pytest.raises(ValidationError):
        primitive_1d({(2,): t(1)}, A)


def test_primitive_needs_the_point_at_infinity():
    with pytest.raises(ValidationError):
        primitive_1d({(): t(1)}, builtin("p1", [0, 1, 2]))


def test_differential_detects_a_wrong_primitive():
    A = builtin("p1", [0, 1, "inf"])
    wrong = Primitive({(0,): t(2)}, line_points(A), 2)
    assert not differential_equals(wrong, {(): t(1) / t(0, 1)})
    assert differential(wrong)[()] == t(2) / t(0, 1)
