import math

import pytest

from hyperarr.errors import DivergentIndex, ValidationError
from hyperarr.mzv import (
    _word_to_index,
    iterated_integral_01,
    mzv_oracle,
    mzv_with_bound,
    polylog_half,
    zeta_single,
    zeta_word,
)

Z2 = math.pi ** 2 / 6
Z4 = math.pi ** 4 / 90


def test_single_zeta_values():
    assert abs(mzv_oracle(2) - Z2) < 1e-13
    assert abs(mzv_oracle(4) - Z4) < 1e-13
    assert abs(mzv_oracle(6) - math.pi ** 6 / 945) < 1e-13
    assert abs(mzv_oracle(3) - 1.2020569031595942) < 1e-13


def test_tail_bound_is_honest():
    value, bound = zeta_single(3, N=8)
    assert bound < 1e-6
    assert abs(value - 1.2020569031595942) <= bound + 1e-15


@pytest.mark.parametrize(
    "index, expected",
    [
        ((2, 1), 1.2020569031595942),  # zeta(2,1) = zeta(3)
        ((3, 1), Z4 / 4),
        ((2, 2), 3 * Z4 / 4),
        ((2, 1, 1), Z4),  # duality with zeta(4)
    ],
)
def test_depth_relations(index, expected):
    value, bound = mzv_with_bound(*index)
    assert bound < 1e-12
    assert abs(value - expected) < 1e-12


def test_depth_one_routes_agree():
    # zeta(3) by the Euler-Maclaurin sum and by the iterated integral at 1/2
    value, _ = iterated_integral_01(zeta_word([3]))
    assert abs(value - mzv_oracle(3)) < 1e-12


def test_polylog_at_one_half():
    # Li_1(1/2) = log 2, Li_2(1/2) = pi^2/12 - log(2)^2/2
    assert abs(polylog_half((1,))[0] - math.log(2)) < 1e-14
    assert abs(polylog_half((2,))[0] - (math.pi ** 2 / 12 - math.log(2) ** 2 / 2)) < 1e-14


def test_word_round_trip():
    for s in [(2,), (3, 1), (2, 2, 1), (4, 1, 2)]:
        w = zeta_word(s)
        assert len(w) == sum(s) and w[0] == 1 and w[-1] == 0
        assert _word_to_index(w) == s
    assert zeta_word((2, 1)) == (1, 1, 0)


def test_divergent_indices():
    for bad in [(1,), (1, 2), (2, 0)]:
        with pytest.raises(DivergentIndex):
            mzv_oracle(*bad)
    with pytest.raises(ValidationError):
        mzv_oracle()
    with pytest.raises(DivergentIndex):
        iterated_integral_01((0, 1))
    with pytest.raises(ValidationError):
        _word_to_index((0, 1))
