"""Monte Carlo estimates of sign moments of threshold stable vectors.

All estimators draw ``(S, S_1, ..., S_n)`` in chunks of ``chunk_size``
trials, chunk ``c`` on stream ``RngStream(seed, c)``. Per-chunk integer
tallies are summed in chunk order, so results do not depend on ``workers``.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .stable_sampler import AlphaLike, RngStream, as_alpha, sample_threshold_arrays

DEFAULT_CHUNK = 2**16
MIN_TRIALS = 10**4
MAX_N = 32

# (sgn X1, sgn S, sgn S1), lexicographic with +1 first
OUTCOMES = tuple(itertools.product((1, -1), repeat=3))
FORBIDDEN = ((-1, 1, 1), (1, -1, -1))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int
    anomalies: int = 0

    def z_score(self, target: float) -> float:
        if self.std_error == 0:
            return 0.0 if self.mean == target else math.inf
        return (self.mean - target) / self.std_error

    def compatible(self, other: "McEstimate", k: float = 3.0) -> bool:
        return abs(self.mean - other.mean) <= k * math.hypot(self.std_error, other.std_error)


@dataclass
class SignVectorPmf:
    """Distribution of ``(sgn X1, sgn S, sgn S1)`` over the eight outcomes."""

    probs: dict
    counts: dict = field(default_factory=dict)
    trials: int = 0
    seed: int | None = None

    def __post_init__(self):
        missing = set(OUTCOMES) - set(self.probs)
        if missing:
            raise ValueError(f"pmf is missing outcomes {sorted(missing)}")
        total = math.fsum(self.probs.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"pmf sums to {total!r}, not 1")

    def as_list(self) -> list:
        return [self.probs[v] for v in OUTCOMES]

    def forbidden_count(self) -> int:
        return sum(self.counts.get(v, 0) for v in FORBIDDEN)

    def max_deviation(self, other: "SignVectorPmf") -> float:
        return max(abs(self.probs[v] - other.probs[v]) for v in OUTCOMES)

    def moment(self, i: int, j: int) -> float:
        return math.fsum(p * v[i] * v[j] for v, p in self.probs.items())


def _product_estimate(equal: int, trials: int, seed: int, anomalies: int = 0) -> McEstimate:
    mean = (2 * equal - trials) / trials
    var = max(0.0, 1.0 - mean * mean) * trials / (trials - 1)
    return McEstimate(mean, math.sqrt(var / trials), trials, seed, anomalies)


def _probability_estimate(hits: int, trials: int, seed: int, anomalies: int = 0) -> McEstimate:
    p = hits / trials
    return McEstimate(p, math.sqrt(p * (1 - p) / trials), trials, seed, anomalies)


def signs_from_draws(s, innovations):
    """Signs of ``S``, ``X_i`` and ``S_i`` without dividing by 2**(1/alpha).

    An exact zero (or an inf - inf NaN) maps to +1 and is tallied as an
    anomaly; both have probability zero under a continuous law.
    """
    s = np.asarray(s, dtype=float)
    innovations = np.asarray(innovations, dtype=float)
    with np.errstate(invalid="ignore"):
        total = s[:, None] + innovations
    bad_x = ~(total != 0)
    bad_s = ~(s != 0)
    anomalies = int(np.count_nonzero(bad_x) + np.count_nonzero(bad_s))
    sgn_x = np.where(total < 0, -1, 1).astype(np.int8)
    sgn_s = np.where(s < 0, -1, 1).astype(np.int8)
    sgn_inn = np.where(innovations < 0, -1, 1).astype(np.int8)
    return sgn_s, sgn_x, sgn_inn, anomalies


def pair_tallies(s, innovations) -> np.ndarray:
    """Integer tallies for the two-coordinate construction.

    Layout: [X1X2 equal, X1>0 & X2>0, X1 S equal, X1>0 & S>0, anomalies,
    then the eight (sgn X1, sgn S, sgn S1) counts in ``OUTCOMES`` order].
    """
    sgn_s, sgn_x, sgn_inn, anomalies = signs_from_draws(s, innovations)
    x1, x2, s1 = sgn_x[:, 0], sgn_x[:, 1], sgn_inn[:, 0]
    code = (x1 < 0) * 4 + (sgn_s < 0) * 2 + (s1 < 0)
    return np.concatenate([
        [
            np.count_nonzero(x1 == x2),
            np.count_nonzero((x1 > 0) & (x2 > 0)),
            np.count_nonzero(x1 == sgn_s),
            np.count_nonzero((x1 > 0) & (sgn_s > 0)),
            anomalies,
        ],
        np.bincount(code, minlength=8),
    ]).astype(np.int64)


def product_tallies(s, innovations) -> np.ndarray:
    """[count of prod sgn(X_i) == +1, anomalies]."""
    _, sgn_x, _, anomalies = signs_from_draws(s, innovations)
    negatives = np.count_nonzero(sgn_x < 0, axis=1)
    return np.array([np.count_nonzero(negatives % 2 == 0), anomalies], dtype=np.int64)


def _check(alpha, trials):
    a = as_alpha(alpha).require_sampler()
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}, got {trials}")
    return a


def run_chunks(alpha: AlphaLike, n: int, trials: int, seed: int, reducer,
               chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> np.ndarray:
    """Simulate ``trials`` threshold vectors of length ``n`` and sum
    ``reducer(s, innovations)`` over chunks in chunk order."""
    a = as_alpha(alpha).require_sampler()
    sizes = [chunk_size] * (trials // chunk_size)
    if trials % chunk_size:
        sizes.append(trials % chunk_size)

    def job(c):
        s, innov = sample_threshold_arrays(a, n, sizes[c], RngStream(seed, c))
        return reducer(s, innov)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(c) for c in range(len(sizes))]
    out = parts[0].copy()
    for part in parts[1:]:
        out += part
    return out


@dataclass
class PairMoments:
    """Every estimate that the two-coordinate construction yields, from one
    shared set of draws."""

    pair_product: McEstimate
    pair_orthant: McEstimate
    x1_s_product: McEstimate
    x1_s_orthant: McEstimate
    pmf: SignVectorPmf
    anomalies: int


def estimate_pair_moments(alpha: AlphaLike, trials: int, seed: int,
                          chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> PairMoments:
    a = _check(alpha, trials)
    t = run_chunks(a, 2, trials, seed, pair_tallies, chunk_size, workers)
    anomalies = int(t[4])
    counts = {v: int(k) for v, k in zip(OUTCOMES, t[5:])}
    pmf = SignVectorPmf({v: k / trials for v, k in counts.items()}, counts, trials, seed)
    return PairMoments(
        pair_product=_product_estimate(int(t[0]), trials, seed, anomalies),
        pair_orthant=_probability_estimate(int(t[1]), trials, seed, anomalies),
        x1_s_product=_product_estimate(int(t[2]), trials, seed, anomalies),
        x1_s_orthant=_probability_estimate(int(t[3]), trials, seed, anomalies),
        pmf=pmf,
        anomalies=anomalies,
    )


def estimate_pair_product(alpha, trials, seed, **kw) -> McEstimate:
    """E[sgn(X1) sgn(X2)]; 1/3 for every alpha in (0, 2]."""
    return estimate_pair_moments(alpha, trials, seed, **kw).pair_product


def estimate_positive_orthant_pair(alpha, trials, seed, **kw) -> McEstimate:
    """P[X1 > 0, X2 > 0]; 1/3."""
    return estimate_pair_moments(alpha, trials, seed, **kw).pair_orthant


def estimate_x1_s_product(alpha, trials, seed, **kw) -> McEstimate:
    """E[sgn(X1) sgn(S)]; 1/2."""
    return estimate_pair_moments(alpha, trials, seed, **kw).x1_s_product


def estimate_positive_orthant_x1_s(alpha, trials, seed, **kw) -> McEstimate:
    """P[X1 > 0, S > 0]; 3/8."""
    return estimate_pair_moments(alpha, trials, seed, **kw).x1_s_orthant


def estimate_sign_vector_pmf(alpha, trials, seed, **kw) -> SignVectorPmf:
    return estimate_pair_moments(alpha, trials, seed, **kw).pmf


def estimate_n_product(alpha: AlphaLike, n: int, trials: int, seed: int,
                       chunk_size: int = DEFAULT_CHUNK, workers: int = 1) -> McEstimate:
    """E[sgn(X1 ... Xn)]: 1/(n+1) for even n, 0 for odd n."""
    a = _check(alpha, trials)
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must be in [1, {MAX_N}], got {n}")
    t = run_chunks(a, n, trials, seed, product_tallies, chunk_size, workers)
    return _product_estimate(int(t[0]), trials, seed, int(t[1]))
