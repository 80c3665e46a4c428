"""Exact divide-and-color law of (sgn X1, sgn S, sgn S1).

Only two partitions of {1, 2, 3} can carry weight: {{1,2},{3}} (X1 follows S)
and {{1,3},{2}} (X1 follows S1). Each block receives an independent fair
colour, so a consistent sign vector has probability weight * 2**-blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .sign_mc import OUTCOMES, SignVectorPmf, estimate_sign_vector_pmf
from .stable_sampler import AlphaLike

# blocks over coordinate indices 0, 1, 2 = (X1, S, S1)
PARTITION_12_3 = ((0, 1), (2,))
PARTITION_13_2 = ((0, 2), (1,))


@dataclass(frozen=True)
class DacPartitionWeights:
    weight_12_3: Fraction = Fraction(1, 2)
    weight_13_2: Fraction = Fraction(1, 2)

    def __post_init__(self):
        a, b = Fraction(self.weight_12_3), Fraction(self.weight_13_2)
        if not (0 <= a <= 1 and 0 <= b <= 1) or a + b != 1:
            raise ValueError(f"partition weights must lie in [0, 1] and sum to 1, got {a}, {b}")
        object.__setattr__(self, "weight_12_3", a)
        object.__setattr__(self, "weight_13_2", b)

    def items(self):
        return ((PARTITION_12_3, self.weight_12_3), (PARTITION_13_2, self.weight_13_2))


EQUAL_WEIGHTS = DacPartitionWeights()


def _consistent(v, partition) -> bool:
    return all(len({v[i] for i in block}) == 1 for block in partition)


def dac_pmf_exact(weights: DacPartitionWeights = EQUAL_WEIGHTS) -> dict:
    pmf = {}
    for v in OUTCOMES:
        p = Fraction(0)
        for partition, w in weights.items():
            if _consistent(v, partition):
                p += w / 2 ** len(partition)
        pmf[v] = p
    return pmf


def dac_pmf(weights: DacPartitionWeights = EQUAL_WEIGHTS) -> SignVectorPmf:
    exact = dac_pmf_exact(weights)
    return SignVectorPmf({v: float(p) for v, p in exact.items()})


def exact_moment(i: int, j: int, weights: DacPartitionWeights = EQUAL_WEIGHTS) -> Fraction:
    """E[v_i v_j] under the exact law; equals the weight of partitions that
    put i and j in the same block."""
    return sum((p * v[i] * v[j] for v, p in dac_pmf_exact(weights).items()), Fraction(0))


def compare_mc_vs_dac(alpha: AlphaLike, trials: int, seed: int,
                      weights: DacPartitionWeights = EQUAL_WEIGHTS, **kw) -> float:
    """Max absolute gap between Monte Carlo sign-vector frequencies and the
    exact divide-and-color pmf."""
    if trials < 10**5:
        raise ValueError(f"trials must be >= 1e5, got {trials}")
    return estimate_sign_vector_pmf(alpha, trials, seed, **kw).max_deviation(dac_pmf(weights))
