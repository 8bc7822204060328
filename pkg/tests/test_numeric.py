import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperarr.arrangement import builtin
from hyperarr.errors import PathTooCloseToSingularity, TruncationTooLarge, ValidationError
from hyperarr.mzv import iterated_integral_01, mzv_oracle
from hyperarr.numeric import (
    Letters,
    TangentialBasepoint,
    all_words,
    associator_1d,
    complex_log_check,
    eval_iterated_integrals,
    identity_series,
    p1_standard_associators,
    regularized_series,
    regularized_series_ladder,
)

LETTERS = Letters([0, 1], [0j, 1 + 0j])
T0 = TangentialBasepoint(0j, 1 + 0j)
T1 = TangentialBasepoint(1 + 0j, -1 + 0j)


@pytest.fixture(scope="module")
def standard():
    return p1_standard_associators(4)


def test_letters_from_an_arrangement():
    L = Letters.of(builtin("p1", [0, 1, "inf"]))
    assert L.labels == [0, 1] and L.points == [0j, 1 + 0j]
    assert L.index_of_point(1.0) == 1 and L.index_of_point(2.0) is None
    with pytest.raises(ValidationError):
        Letters.of(builtin("braid", [3]))


def test_all_words_count_and_cap():
    assert len(all_words(2, 3)) == 1 + 2 + 4 + 8
    with pytest.raises(TruncationTooLarge):
        all_words(2, 13)


def test_weight_one_matches_the_logarithm():
    p, q = 0.3 + 0.2j, -0.4 + 0.7j
    S = eval_iterated_integrals(LETTERS, 1, [p, q])
    for i, a in enumerate(LETTERS.points):
        assert abs(S[(i,)] - complex_log_check(a, p, q)) < 1e-12


def test_chen_composition():
    p, m, q = 0.3 + 0.2j, 0.5 + 0.8j, -0.4 + 0.5j
    whole = eval_iterated_integrals(LETTERS, 3, [p, m, q])
    split = eval_iterated_integrals(LETTERS, 3, [p, m]).concat(eval_iterated_integrals(LETTERS, 3, [m, q]))
    assert whole.max_diff(split) < 1e-9


# the strip 0.2 <= Im z <= 1.5 is convex and avoids 0 and 1, so any two
# polylines inside it with the same endpoints are homotopic
upper = st.builds(complex, st.floats(-1, 2), st.floats(0.2, 1.5))


@given(upper, upper, upper)
def test_chen_composition_random(p, m, q):
    whole = eval_iterated_integrals(LETTERS, 3, [p, m, q])
    split = eval_iterated_integrals(LETTERS, 3, [p, m]).concat(eval_iterated_integrals(LETTERS, 3, [m, q]))
    assert whole.max_diff(split) < 1e-9


@given(upper, upper, st.lists(upper, max_size=3))
def test_homotopy_invariance_random(p, q, via):
    straight = eval_iterated_integrals(LETTERS, 3, [p, q])
    bent = eval_iterated_integrals(LETTERS, 3, [p, *via, q])
    assert straight.max_diff(bent) < 1e-8


@given(upper)
def test_regularized_series_group_like_random(z):
    assert regularized_series(LETTERS, 3, T0, z).shuffle_defect() < 1e-7


def test_homotopy_invariance():
    p, q = 0.5 + 0.5j, 0.5 - 0.5j
    straight = eval_iterated_integrals(LETTERS, 3, [p, q])
    bent = eval_iterated_integrals(LETTERS, 3, [p, 0.3 + 0.1j, 0.7 - 0.1j, q])
    assert straight.max_diff(bent) < 1e-8


def test_loop_around_one():
    loop = [1.5, 1 + 0.5j, 0.5, 1 - 0.5j, 1.5]
    S = eval_iterated_integrals(LETTERS, 2, loop)
    assert abs(S[(1,)] - 2j * math.pi) < 1e-10
    assert abs(S[(0,)]) < 1e-10
    assert abs(S[(1, 1)] - (2j * math.pi) ** 2 / 2) < 1e-9


def test_reversed_path():
    path = [0.3 + 0.2j, 0.5 + 0.8j, -0.4 + 0.5j]
    fwd = eval_iterated_integrals(LETTERS, 3, path)
    back = eval_iterated_integrals(LETTERS, 3, path[::-1])
    assert fwd.reversed_path().max_diff(back) < 1e-9
    assert fwd.concat(back).max_diff(identity_series(LETTERS, 3)) < 1e-9


def test_path_too_close_to_a_singularity():
    with pytest.raises(PathTooCloseToSingularity):
        eval_iterated_integrals(LETTERS, 2, [-1 + 0j, 1e-8j])


def test_regularized_series_is_group_like():
    S = regularized_series(LETTERS, 4, T0, 0.5 + 0.3j)
    assert S.shuffle_defect() < 1e-7


def test_ladder_cross_check():
    exact = regularized_series(LETTERS, 2, T0, 0.5 + 0.3j)
    ladder = regularized_series_ladder(LETTERS, 2, T0, 0.5 + 0.3j)
    assert exact.max_diff(ladder) < 5e-4


def test_zeta_values_from_the_associator(standard):
    G = standard["G(0,1)"]
    z2, z3 = math.pi ** 2 / 6, mzv_oracle(3)
    assert abs(G[(0, 1)] - z2) < 1e-6
    assert abs(G[(0, 0, 1)] + z3) < 1e-6
    assert abs(G[(0,)]) < 1e-9 and abs(G[(1,)]) < 1e-9


def test_convergent_words_against_the_mzv_oracle(standard):
    G = standard["G(0,1)"]
    checked = 0
    for w in all_words(2, 4):
        if len(w) >= 2 and w[0] == 1 and w[-1] == 0:
            value, bound = iterated_integral_01(w)
            assert bound < 1e-10
            assert abs(G[w] - (-1) ** sum(w) * value) < 1e-6, w
            checked += 1
    assert checked == 1 + 2 + 4


def test_associators_are_group_like(standard):
    for S in standard.values():
        assert S.shuffle_defect() < 1e-7


def test_composition_through_infinity(standard):
    composed = standard["G(0,inf)"].concat(standard["G(inf,1)"])
    assert composed.max_diff(standard["G(0,1)"]) < 1e-7


def test_reversing_the_associator(standard):
    back = associator_1d(LETTERS, T1, T0, 3)
    rev = standard["G(0,1)"].reversed_path()
    assert max(abs(back[w] - rev[w]) for w in all_words(2, 3)) < 1e-8


def test_associator_weight_cap():
    with pytest.raises(TruncationTooLarge):
        associator_1d(LETTERS, T0, T1, 5)


def test_weight_one_regularization_uses_the_tangent():
    # Reg int_{0, v}^z dlog t = log(z / v)
    v = cmath.exp(0.3j)
    S = regularized_series(LETTERS, 1, TangentialBasepoint(0j, v), 0.5 + 0.5j)
    assert abs(S[(0,)] - cmath.log((0.5 + 0.5j) / v)) < 1e-10
