import cmath
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperarr.errors import DivisionByZero, FieldMismatch, ValidationError
from hyperarr.field import (
    QQ,
    Cyclotomic,
    Field,
    cyclotomic_polynomial,
    embed_numeric,
    euler_phi,
    format_scalar,
    scalar_from_json,
    scalar_to_json,
)

ORDERS = [1, 2, 3, 4, 5, 6, 8, 12]
small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def cyclotomics(draw, order=None):
    q = draw(st.sampled_from(ORDERS)) if order is None else order
    deg = euler_phi(q)
    return Cyclotomic(q, draw(st.lists(small, min_size=deg, max_size=deg)))


@st.composite
def triples(draw):
    q = draw(st.sampled_from(ORDERS))
    return tuple(draw(cyclotomics(q)) for _ in range(3))


def close(a: complex, b: complex, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def test_cyclotomic_polynomials_have_the_right_degree_and_roots():
    for q in ORDERS:
        phi = cyclotomic_polynomial(q)
        assert len(phi) - 1 == euler_phi(q)
        z = cmath.exp(2j * cmath.pi / q)
        assert abs(sum(c * z ** k for k, c in enumerate(phi))) < 1e-9


@given(triples())
def test_field_axioms(t):
    a, b, c = t
    q = a.order
    zero, one = Cyclotomic(q, [0]), Cyclotomic(q, [1])
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a + zero == a and a * one == a
    assert a - a == zero
    if a != zero:
        assert a * a.inverse() == one
        assert (b / a) * a == b


@given(triples())
def test_numeric_embedding_is_a_ring_homomorphism(t):
    # independent route: complex arithmetic on exp(2 pi i / q)
    a, b, _ = t
    ea, eb = embed_numeric(a), embed_numeric(b)
    assert close(embed_numeric(a + b), ea + eb)
    assert close(embed_numeric(a * b), ea * eb)
    if a:
        assert close(embed_numeric(a.inverse()), 1 / ea)


@pytest.mark.parametrize("q", ORDERS)
def test_zeta_is_a_primitive_root_of_unity(q):
    z = Cyclotomic.zeta(q)
    one = Cyclotomic(q, [1])
    assert z ** q == one
    for k in range(1, q):
        assert z ** k != one or q == 1
    assert Cyclotomic.zeta(q, -1) * z == one


def test_division_by_zero_is_reported():
    with pytest.raises(DivisionByZero):
        Cyclotomic(5, [0]).inverse()
    with pytest.raises(ZeroDivisionError):
        Cyclotomic(3, [1, 2]) / Cyclotomic(3, [])


def test_field_coercion():
    assert QQ("3/4") == Fraction(3, 4)
    assert Field(4)(2) == Cyclotomic(4, [2])
    assert QQ(Cyclotomic(3, [5])) == 5
    with pytest.raises(FieldMismatch):
        QQ(Cyclotomic.zeta(3))
    with pytest.raises(FieldMismatch):
        Field(4)(Cyclotomic.zeta(3))
    with pytest.raises(ValidationError):
        QQ(0.5)


@given(cyclotomics())
def test_json_round_trip(a):
    assert scalar_from_json(scalar_to_json(a), Field(a.order)) == a


def test_formatting_is_canonical():
    assert format_scalar(Fraction(-2, 6)) == "-1/3"
    assert format_scalar(Cyclotomic(4, [1, -2])) == "1 - 2*z4^1"
    assert format_scalar(Cyclotomic(3, [0, 1])) == "z3^1"
