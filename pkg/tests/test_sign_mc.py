import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import multivariate_normal

from stablesign.sign_mc import (
    FORBIDDEN,
    OUTCOMES,
    McEstimate,
    SignVectorPmf,
    estimate_n_product,
    estimate_pair_moments,
    estimate_pair_product,
    estimate_positive_orthant_pair,
    estimate_positive_orthant_x1_s,
    estimate_sign_vector_pmf,
    estimate_x1_s_product,
    pair_tallies,
    signs_from_draws,
)
from stablesign.stable_sampler import AlphaDomainError, RngStream, sample_threshold_arrays

N = 10**6
SEED = 2024


@lru_cache(maxsize=None)
def moments(alpha, trials=N, seed=SEED):
    return estimate_pair_moments(alpha, trials, seed)


def near(est: McEstimate, target, k=3.0):
    return abs(est.mean - target) <= k * est.std_error


def gaussian_orthant(rho):
    # P[Z1 > 0, Z2 > 0] for unit normals with correlation rho, via scipy's
    # numerical bivariate CDF (independent of the arcsine formula)
    return multivariate_normal(mean=[0, 0], cov=[[1, rho], [rho, 1]]).cdf([0, 0])


def test_gaussian_orthant_oracle_matches_arcsine():
    for rho in (0.5, 1 / math.sqrt(2)):
        product = 4 * gaussian_orthant(rho) - 1
        assert product == pytest.approx(2 / math.pi * math.asin(rho), abs=1e-6)
    assert 2 / math.pi * math.asin(0.5) == pytest.approx(1 / 3, abs=1e-15)
    assert 2 / math.pi * math.asin(1 / math.sqrt(2)) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("alpha", [1.0, 2.0, 0.5])
def test_pair_product(alpha):
    assert near(moments(alpha).pair_product, 1 / 3)


def test_gaussian_anchor_against_oracle():
    m = moments(2.0)
    assert near(m.pair_product, 4 * gaussian_orthant(0.5) - 1)
    assert near(m.x1_s_product, 4 * gaussian_orthant(1 / math.sqrt(2)) - 1)


@pytest.mark.parametrize("alpha", [1.0, 1.9])
def test_positive_orthant_pair(alpha):
    assert near(moments(alpha).pair_orthant, 1 / 3)


def test_x1_s_moments():
    assert near(moments(1.0).x1_s_product, 0.5)
    assert near(moments(0.75).x1_s_orthant, 3 / 8)


def test_single_estimators_match_shared_run():
    m = estimate_pair_moments(1.3, 10**4, 5)
    assert estimate_pair_product(1.3, 10**4, 5) == m.pair_product
    assert estimate_positive_orthant_pair(1.3, 10**4, 5) == m.pair_orthant
    assert estimate_x1_s_product(1.3, 10**4, 5) == m.x1_s_product
    assert estimate_positive_orthant_x1_s(1.3, 10**4, 5) == m.x1_s_orthant
    assert estimate_sign_vector_pmf(1.3, 10**4, 5) == m.pmf
    assert estimate_n_product(1.3, 2, 10**4, 5) == m.pair_product


def test_identity_per_outcome_on_shared_data():
    m = moments(1.0)
    probs = m.pmf.probs
    equal = sum(p for v, p in probs.items() if v[0] == v[1])
    # (sgn X1, sgn S) agreement read off the pmf equals the product estimator
    assert m.x1_s_product.mean == pytest.approx(equal - (1 - equal), abs=1e-12)
    # 4 P[both positive] - 1 only holds in law
    z = (4 * m.pair_orthant.mean - 1) - m.pair_product.mean
    assert abs(z) <= 3 * math.hypot(4 * m.pair_orthant.std_error, m.pair_product.std_error)


def test_std_error_definitions():
    s, innov = sample_threshold_arrays(1.1, 2, 10**4, RngStream(9, 0))
    m = estimate_pair_moments(1.1, 10**4, 9, chunk_size=10**4)
    _, sx, _, _ = signs_from_draws(s, innov)
    prod = (sx[:, 0] * sx[:, 1]).astype(float)
    assert m.pair_product.mean == pytest.approx(prod.mean(), abs=1e-15)
    assert m.pair_product.std_error == pytest.approx(prod.std(ddof=1) / 100, rel=1e-12)
    p = m.pair_orthant.mean
    assert m.pair_orthant.std_error == pytest.approx(math.sqrt(p * (1 - p) / 10**4))


@pytest.mark.parametrize("alpha,n,target", [(1.0, 2, 1 / 3), (1.5, 4, 1 / 5), (1.0, 3, 0.0)])
def test_n_product(alpha, n, target):
    assert near(estimate_n_product(alpha, n, N, SEED), target)


def test_pmf_examples():
    pmf = moments(1.0).pmf
    assert pmf.counts[(-1, 1, 1)] == 0
    p = 0.25
    assert abs(pmf.probs[(1, 1, 1)] - p) <= 3 * math.sqrt(p * (1 - p) / N)
    assert math.fsum(pmf.probs.values()) == pytest.approx(1.0, abs=1e-12)
    assert sum(pmf.counts.values()) == N


@given(alpha=st.floats(0.05, 2.0), seed=st.integers(0, 2**64 - 1))
@settings(max_examples=15, deadline=None)
def test_forbidden_outcomes_never_occur(alpha, seed):
    pmf = estimate_sign_vector_pmf(alpha, 10**4, seed)
    assert pmf.forbidden_count() == 0
    assert all(pmf.counts[v] == 0 for v in FORBIDDEN)


def test_alpha_invariance():
    ests = [moments(a).pair_product for a in (0.5, 1.0, 1.5, 1.9)]
    for i, a in enumerate(ests):
        for b in ests[i + 1:]:
            assert a.compatible(b)


def test_negation_symmetry():
    s, innov = sample_threshold_arrays(0.8, 2, 200_000, RngStream(31))
    t = pair_tallies(s, innov)
    u = pair_tallies(-s, -innov)
    # products are invariant sample by sample
    assert t[0] == u[0] and t[2] == u[2]
    trials = s.size
    for k in (1, 3):
        p, q = t[k] / trials, u[k] / trials
        se = math.sqrt(p * (1 - p) / trials + q * (1 - q) / trials)
        assert abs(p - q) <= 3 * se


def test_workers_do_not_change_results():
    a = estimate_pair_moments(0.9, 300_000, 77, workers=1)
    b = estimate_pair_moments(0.9, 300_000, 77, workers=4)
    assert a == b
    assert estimate_n_product(0.9, 5, 200_000, 3, workers=3) == estimate_n_product(0.9, 5, 200_000, 3)


def test_zero_sums_are_counted_anomalies():
    s = np.array([1.0, 0.0, -2.0])
    innov = np.array([[-1.0, 2.0], [3.0, -1.0], [2.0, 5.0]])
    sgn_s, sgn_x, _, anomalies = signs_from_draws(s, innov)
    assert sgn_x[0, 0] == 1 and sgn_x[2, 0] == 1
    assert sgn_s[1] == 1
    assert anomalies == 3


def test_preconditions():
    with pytest.raises(ValueError):
        estimate_pair_product(1.0, 9_999, 1)
    with pytest.raises(AlphaDomainError):
        estimate_pair_product(2.5, 10**4, 1)
    with pytest.raises(ValueError):
        estimate_n_product(1.0, 33, 10**4, 1)
    with pytest.raises(ValueError):
        estimate_n_product(1.0, 0, 10**4, 1)


def test_pmf_validation():
    with pytest.raises(ValueError):
        SignVectorPmf({v: 0.1 for v in OUTCOMES})
    with pytest.raises(ValueError):
        SignVectorPmf({(1, 1, 1): 1.0})
