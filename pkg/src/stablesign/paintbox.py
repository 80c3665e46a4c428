"""The geometric paintbox with box masses 1/2, 1/4, 1/8, ...

Element i falls in box j with probability 2**-j; each occupied box gets an
independent fair colour in {-1, +1} and every element copies its box colour.
The resulting sequence is exchangeable with a uniform de Finetti mixing
measure, and E[V_1 ... V_n] equals the probability that all blocks of the
partition of {1..n} have even size, which is 1/(n+1) for even n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np
from scipy.stats import kstest

from .stable_sampler import RngLike, RngStream, as_generator

MAX_EXACT_N = 200


@lru_cache(maxsize=None)
def _all_even(n: int) -> Fraction:
    if n == 0:
        return Fraction(1)
    # condition on the k elements landing in box 1; the rest see a paintbox
    # with the same law (boxes 2, 3, ... rescaled by 2)
    half_n = Fraction(1, 2**n)
    rhs = sum((comb(n, k) * half_n * _all_even(n - k) for k in range(2, n + 1, 2)), Fraction(0))
    return rhs / (1 - half_n)


def all_even_probability(n: int) -> Fraction:
    """Exact probability that every block of the paintbox partition of
    {1..n} has even size."""
    if not 0 <= n <= MAX_EXACT_N:
        raise ValueError(f"n must be in [0, {MAX_EXACT_N}], got {n}")
    # fill the cache bottom-up to keep the recursion shallow
    for m in range(n + 1):
        _all_even(m)
    return _all_even(n)


def box_indices(u) -> np.ndarray:
    """Box j with u in (2**-j, 2**-(j-1)], for u in (0, 1]; a dyadic u sits in
    the lower-index box."""
    u = np.asarray(u, dtype=float)
    return np.maximum(1, np.ceil(-np.log2(u))).astype(np.int64)


def _draw_boxes(gen: np.random.Generator, shape) -> np.ndarray:
    # 1 - random() is in (0, 1]; its smallest value 2**-53 caps the index at 53
    return box_indices(1.0 - gen.random(shape))


@dataclass
class PaintboxSample:
    box_of: list
    colors: dict
    values: list

    @property
    def n(self) -> int:
        return len(self.box_of)


def sample_paintbox(n: int, rng: RngLike) -> PaintboxSample:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gen = as_generator(rng)
    boxes = [int(j) for j in _draw_boxes(gen, n)]
    used = sorted(set(boxes))
    colors = {j: int(z) for j, z in zip(used, gen.choice((-1, 1), size=len(used)))}
    return PaintboxSample(boxes, colors, [colors[j] for j in boxes])


def all_blocks_even(sample) -> bool:
    box_of = sample.box_of if isinstance(sample, PaintboxSample) else sample
    counts = {}
    for j in box_of:
        counts[j] = counts.get(j, 0) + 1
    return all(c % 2 == 0 for c in counts.values())


def _parity_masks(boxes: np.ndarray) -> np.ndarray:
    # bit j set iff box j holds an odd number of elements (j <= 53)
    bits = np.left_shift(np.uint64(1), boxes.astype(np.uint64))
    return np.bitwise_xor.reduce(bits, axis=1)


def _colour_values(gen: np.random.Generator, boxes: np.ndarray) -> np.ndarray:
    rows = boxes.shape[0]
    colours = gen.choice(np.array([-1, 1], dtype=np.int8), size=(rows, 54))
    return np.take_along_axis(colours, boxes, axis=1)


@dataclass(frozen=True)
class PaintboxEstimate:
    all_even: int
    product_sum: int
    samples: int
    n: int

    @property
    def all_even_frequency(self) -> float:
        return self.all_even / self.samples

    @property
    def all_even_std_error(self) -> float:
        p = self.all_even_frequency
        return math.sqrt(p * (1 - p) / self.samples)

    @property
    def product_mean(self) -> float:
        return self.product_sum / self.samples

    @property
    def product_std_error(self) -> float:
        m = self.product_mean
        return math.sqrt(max(0.0, 1 - m * m) / (self.samples - 1))


def simulate_paintbox(n: int, samples: int, seed: int, chunk_size: int = 2**16) -> PaintboxEstimate:
    """Simulate ``samples`` independent paintbox draws of ``(V_1..V_n)`` and
    tally the all-even event and the product V_1 ... V_n."""
    if n < 1 or samples < 1:
        raise ValueError("n and samples must be positive")
    even = 0
    prod = 0
    for c, start in enumerate(range(0, samples, chunk_size)):
        size = min(chunk_size, samples - start)
        gen = RngStream(seed, c).generator()
        boxes = _draw_boxes(gen, (size, n))
        even += int(np.count_nonzero(_parity_masks(boxes) == 0))
        values = _colour_values(gen, boxes)
        negatives = np.count_nonzero(values < 0, axis=1)
        prod += int(np.sum(np.where(negatives % 2 == 0, 1, -1)))
    return PaintboxEstimate(even, prod, samples, n)


def mixing_fractions(m: int, replicates: int, rng: RngLike, single_box: bool = False) -> np.ndarray:
    """Fraction of +1 among (V_1..V_m), one per replicate.

    ``single_box=True`` puts every element in one box (negative control).
    """
    gen = as_generator(rng)
    out = np.empty(replicates)
    rows = max(1, 2**20 // m)
    for start in range(0, replicates, rows):
        r = min(rows, replicates - start)
        if single_box:
            boxes = np.ones((r, m), dtype=np.int64)
        else:
            boxes = _draw_boxes(gen, (r, m))
        values = _colour_values(gen, boxes)
        out[start:start + r] = np.count_nonzero(values > 0, axis=1) / m
    return out


def definetti_uniformity_stat(m: int, replicates: int, rng: RngLike, single_box: bool = False) -> float:
    """KS distance of the per-replicate +1 fractions from Uniform[0, 1]."""
    if m < 1 or replicates < 1:
        raise ValueError("m and replicates must be positive")
    return float(kstest(mixing_fractions(m, replicates, rng, single_box), "uniform").statistic)
