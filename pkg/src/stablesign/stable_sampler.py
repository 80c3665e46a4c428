"""Symmetric alpha-stable variates and the shared-component threshold vectors.

Variates have scale one, i.e. characteristic function ``exp(-|t|**alpha)``.
Threshold vectors are built from i.i.d. draws ``S, S_1, ..., S_n`` with
``X_i = (S + S_i) / 2**(1/alpha)``; sign statistics never need the division.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

ALPHA_FLOOR = 0.05
SAMPLER_MAX_ALPHA = 2.0


class AlphaDomainError(ValueError):
    """Raised when a stability exponent is outside the domain of an operation."""


@dataclass(frozen=True)
class Alpha:
    """Stability exponent, validated once at construction.

    Any finite positive value is accepted; ``sampler_valid`` tells whether the
    samplers will take it (``ALPHA_FLOOR <= alpha <= 2``).
    """

    value: float

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v) or v <= 0:
            raise AlphaDomainError(f"alpha must be finite and > 0, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def quadrature_valid(self) -> bool:
        return True

    @property
    def sampler_valid(self) -> bool:
        return ALPHA_FLOOR <= self.value <= SAMPLER_MAX_ALPHA

    def require_sampler(self) -> "Alpha":
        if self.value > SAMPLER_MAX_ALPHA:
            raise AlphaDomainError(f"sampler requires alpha <= 2, got {self.value}")
        if self.value < ALPHA_FLOOR:
            raise AlphaDomainError(
                f"sampler requires alpha >= {ALPHA_FLOOR} (overflow floor), got {self.value}"
            )
        return self

    def __float__(self):
        return self.value


AlphaLike = Union[Alpha, float, int]


def as_alpha(alpha: AlphaLike) -> Alpha:
    return alpha if isinstance(alpha, Alpha) else Alpha(alpha)


@dataclass(frozen=True)
class RngStream:
    """Value-like handle on an independent random stream.

    Each ``(seed, stream_index)`` pair maps to its own Philox key through
    ``numpy.random.SeedSequence``, so chunk ``c`` of a job always sees the same
    variates no matter which thread or in what order it runs.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64 and 0 <= self.stream_index < 2**64):
            raise ValueError("seed and stream_index must be unsigned 64-bit integers")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, index)


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def cms_transform(alpha: float, angle, w):
    """Symmetric Chambers-Mallows-Stuck map.

    ``angle`` is uniform on (-pi/2, pi/2) and ``w`` is standard exponential.
    At alpha == 1 the map is exactly ``tan(angle)``. For the symmetric law the
    generic expression is continuous through alpha = 1 (the exponent
    ``(1 - alpha)/alpha`` just goes to zero), so no near-one special casing
    is needed.
    """
    angle = np.asarray(angle, dtype=float)
    if alpha == 1.0:
        return np.tan(angle)
    w = np.asarray(w, dtype=float)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        return (
            np.sin(alpha * angle)
            / np.cos(angle) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * angle) / w) ** ((1.0 - alpha) / alpha)
        )


def _draw(alpha: float, gen: np.random.Generator, shape):
    # fixed draw order: all angles, then all exponentials
    angle = gen.uniform(-math.pi / 2, math.pi / 2, size=shape)
    w = gen.standard_exponential(size=shape)
    return cms_transform(alpha, angle, w)


def sample_sas(alpha: AlphaLike, rng: RngLike, size=None):
    """Draw SαS(scale 1) variates.

    With ``size=None`` a single float is returned. Passing an ``RngStream``
    replays that stream from its start, so repeated calls are identical.
    """
    a = as_alpha(alpha).require_sampler()
    gen = as_generator(rng)
    out = _draw(a.value, gen, 1 if size is None else size)
    return float(out[0]) if size is None else out


@dataclass
class ThresholdVector:
    """One draw of the shared variate ``s`` and the innovations ``S_1..S_n``."""

    alpha: float
    s: float
    innovations: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.innovations)

    def signs(self) -> list[int]:
        # sign(X_i) = sign(s + S_i) since 2**(1/alpha) > 0
        return [1 if self.s + v >= 0 else -1 for v in self.innovations]

    def x_values(self) -> list[float]:
        scale = 2.0 ** (1.0 / self.alpha)
        return [(self.s + v) / scale for v in self.innovations]


def sample_threshold_arrays(alpha: AlphaLike, n: int, size: int, rng: RngLike):
    """Vectorised threshold draws: returns ``(s, innovations)`` of shapes
    ``(size,)`` and ``(size, n)``. Column 0 of the underlying draw is ``S``."""
    a = as_alpha(alpha).require_sampler()
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    raw = _draw(a.value, as_generator(rng), (size, n + 1))
    return raw[:, 0], raw[:, 1:]


def sample_threshold_vector(alpha: AlphaLike, n: int, rng: RngLike) -> ThresholdVector:
    a = as_alpha(alpha)
    s, innov = sample_threshold_arrays(a, n, 1, rng)
    return ThresholdVector(a.value, float(s[0]), [float(v) for v in innov[0]])


def threshold_x(alpha: AlphaLike, s, innovations):
    """Materialise ``X_i = (s + S_i) / 2**(1/alpha)`` (only for CF checks)."""
    a = as_alpha(alpha).value
    s = np.asarray(s, dtype=float)
    innovations = np.asarray(innovations, dtype=float)
    return (s[..., None] + innovations) / 2.0 ** (1.0 / a)


def empirical_cf(samples, t: float) -> float:
    """Real part of the empirical characteristic function at ``t``."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empirical_cf needs at least one sample")
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    return float(np.mean(np.cos(t * x)))


def empirical_cf_sine(samples, t: float) -> float:
    """Imaginary part of the empirical CF; zero in law for a symmetric sample,
    so a large value flags a sampler bug."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ValueError("empirical_cf_sine needs at least one sample")
    return float(np.mean(np.sin(t * x)))
