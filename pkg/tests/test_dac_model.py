from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stablesign.dac_model import (
    DacPartitionWeights,
    compare_mc_vs_dac,
    dac_pmf,
    dac_pmf_exact,
    exact_moment,
)
from stablesign.sign_mc import OUTCOMES

EXPECTED = [Fraction(1, 4), Fraction(1, 8), Fraction(1, 8), 0, 0, Fraction(1, 8), Fraction(1, 8), Fraction(1, 4)]

weights = st.fractions(min_value=0, max_value=1, max_denominator=1000).map(
    lambda w: DacPartitionWeights(w, 1 - w)
)


def test_equal_weight_pmf():
    exact = dac_pmf_exact()
    assert [exact[v] for v in OUTCOMES] == EXPECTED
    assert exact[(1, 1, 1)] == Fraction(1, 4)
    assert exact[(-1, 1, 1)] == 0
    assert exact[(1, 1, -1)] == Fraction(1, 8)


def test_float_interface():
    assert dac_pmf().as_list() == [float(p) for p in EXPECTED]


@given(weights)
def test_pmf_sums_to_one_exactly(w):
    assert sum(dac_pmf_exact(w).values()) == 1


@given(weights)
def test_global_flip_symmetry(w):
    exact = dac_pmf_exact(w)
    for v in OUTCOMES:
        assert exact[v] == exact[tuple(-x for x in v)]


@given(weights)
def test_covariance_identity(w):
    assert exact_moment(0, 1, w) == w.weight_12_3
    assert exact_moment(0, 2, w) == w.weight_13_2
    assert exact_moment(1, 2, w) == 0


def test_covariance_link_equal_weights():
    assert exact_moment(0, 1) == Fraction(1, 2)
    assert dac_pmf().moment(0, 1) == 0.5


@pytest.mark.parametrize("bad", [(Fraction(1, 2), Fraction(1, 3)), (Fraction(3, 2), Fraction(-1, 2))])
def test_invalid_weights(bad):
    with pytest.raises(ValueError):
        DacPartitionWeights(*bad)


@pytest.mark.parametrize("alpha", [1.0, 1.5])
def test_mc_matches_exact(alpha):
    assert compare_mc_vs_dac(alpha, 10**6, 808) <= 0.005


def test_negative_control_weights():
    assert compare_mc_vs_dac(1.0, 10**6, 808, DacPartitionWeights(1, 0)) >= 0.1


def test_trials_precondition():
    with pytest.raises(ValueError):
        compare_mc_vs_dac(1.0, 10**4, 1)
