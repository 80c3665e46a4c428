"""Cross-verification runs and their machine-readable reports.

A run produces a list of check records in a fixed order. Everything except
the ``metadata`` block (wall-clock times, worker count) is a deterministic
function of the configuration.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional

import mpmath

from . import __version__
from .dac_model import dac_pmf
from .paintbox import all_even_probability, definetti_uniformity_stat, simulate_paintbox
from .quadrature import (
    PV_AGREEMENT_TOL,
    QuadratureError,
    integrate_I2,
    pv_integrate_I1,
)
from .sign_mc import MIN_TRIALS, estimate_n_product, estimate_pair_moments
from .stable_sampler import ALPHA_FLOOR, SAMPLER_MAX_ALPHA, RngStream

COMMANDS = ("integrate", "mc-signs", "paintbox", "dac-check", "report")

MC_TOLERANCE = 0.005
MC_SIGMAS = 4.0
DAC_TOLERANCE = 0.005
KS_THRESHOLD = 0.019  # frozen by scripts/calibrate_ks.py

mpmath.mp.dps = 50
_PI2 = mpmath.pi**2

# name -> (expression, value); evaluated once at 50 digits
TARGETS = {
    "I1": ("pi^2/6", float(_PI2 / 6)),
    "I2": ("pi^2/4", float(_PI2 / 4)),
    "pair_product": ("1/3", 1 / 3),
    "pair_orthant": ("1/3", 1 / 3),
    "x1_s_product": ("1/2", 1 / 2),
    "x1_s_orthant": ("3/8", 3 / 8),
    "gauss_pair_product": ("(2/pi) asin(1/2)", float(2 / mpmath.pi * mpmath.asin(mpmath.mpf(1) / 2))),
    "gauss_x1_s_product": ("(2/pi) asin(1/sqrt 2)", float(2 / mpmath.pi * mpmath.asin(1 / mpmath.sqrt(2)))),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str = "report"
    alpha_grid: list = field(default_factory=lambda: [0.5, 1.0, 1.5])
    trials: int = 10**6
    seed: int = 42
    tol: float = 1e-8
    n_values: list = field(default_factory=lambda: [2, 3, 4, 6])
    output_format: str = "json"
    output_path: Optional[str] = None
    which: str = "both"
    ks_m: int = 10**4
    ks_replicates: int = 10**4
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.output_format!r}")
        if self.which not in ("I1", "I2", "both"):
            raise ConfigError(f"--which must be I1, I2 or both, got {self.which!r}")
        for a in self.alpha_grid:
            if not (math.isfinite(a) and a > 0):
                raise ConfigError(f"every alpha must be finite and > 0, got {a}")
        if not (self.tol >= 1e-10):
            raise ConfigError(f"tol must be >= 1e-10, got {self.tol}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.command in ("mc-signs", "dac-check"):
            bad = [a for a in self.alpha_grid if not ALPHA_FLOOR <= a <= SAMPLER_MAX_ALPHA]
            if bad:
                raise ConfigError(f"Monte Carlo needs {ALPHA_FLOOR} <= alpha <= 2, got {bad}")
        if self.command in ("mc-signs", "dac-check", "report") and self.trials < MIN_TRIALS:
            raise ConfigError(f"trials must be >= {MIN_TRIALS} for Monte Carlo, got {self.trials}")
        if self.command == "dac-check" and self.trials < 10**5:
            raise ConfigError("dac-check needs trials >= 1e5")
        for n in self.n_values:
            if not 1 <= n <= 32:
                raise ConfigError(f"n values must lie in [1, 32], got {n}")
        return self

    def echo(self) -> dict:
        """Config as echoed in the report; excludes output and parallelism."""
        d = asdict(self)
        for key in ("output_path", "output_format", "workers"):
            d.pop(key)
        return d


@dataclass
class Check:
    name: str
    value: object
    target: object
    tolerance: float
    passed: bool
    alpha: Optional[float] = None
    n: Optional[int] = None
    std_error: Optional[float] = None
    note: Optional[str] = None

    def to_dict(self) -> dict:
        d = {"name": self.name}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        if self.n is not None:
            d["n"] = self.n
        d["value"] = self.value
        d["target"] = self.target
        d["tolerance"] = self.tolerance
        if self.std_error is not None:
            d["std_error"] = self.std_error
        if self.note is not None:
            d["note"] = self.note
        d["pass"] = self.passed
        return d


@dataclass
class Report:
    config: dict
    checks: list
    runtimes_ms: list
    workers: int = 1
    version: str = __version__
    started_at: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def deterministic(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }

    def to_dict(self) -> dict:
        d = self.deterministic()
        d["metadata"] = {
            "deterministic": False,
            "started_at": self.started_at,
            "workers": self.workers,
            "runtime_ms": self.runtimes_ms,
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = ["name", "alpha", "n", "value", "target", "tolerance", "std_error", "pass"]
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for c in self.checks:
            w.writerow(c.to_dict())
        return buf.getvalue()


def _mc_check(name, est, alpha, target_key=None, n=None, target=None) -> Check:
    if target is None:
        target = TARGETS[target_key or name][1]
    tol = max(MC_TOLERANCE, MC_SIGMAS * est.std_error)
    note = f"{est.anomalies} zero-sign anomalies" if est.anomalies else None
    return Check(name, est.mean, target, tol, abs(est.mean - target) <= tol,
                 alpha=alpha, n=n, std_error=est.std_error, note=note)


class _Runner:
    def __init__(self, config: RunConfig):
        self.cfg = config
        self.checks: list = []
        self.runtimes: list = []
        self._i1 = {}
        self._pairs = {}

    def _pair_moments(self, a):
        if a not in self._pairs:
            self._pairs[a] = estimate_pair_moments(a, self.cfg.trials, self.cfg.seed, workers=self.cfg.workers)
        return self._pairs[a]

    def _add(self, check: Check, t0: float):
        self.checks.append(check)
        self.runtimes.append(round((time.perf_counter() - t0) * 1000, 3))

    # -- quadrature
    def integrals(self):
        cfg = self.cfg
        for a in cfg.alpha_grid:
            if cfg.which in ("I1", "both"):
                t0 = time.perf_counter()
                try:
                    res = pv_integrate_I1(a, cfg.tol)
                    note = None
                except QuadratureError as exc:
                    res, note = exc.result, str(exc)
                target = TARGETS["I1"][1]
                ok = note is None and abs(res.value - target) <= cfg.tol
                self._i1[a] = res.value
                self._add(Check("I1", res.value, target, cfg.tol, ok, alpha=a, note=note), t0)
                t0 = time.perf_counter()
                agree = res.excision_diagnostic.agreement
                self._add(Check("I1_pv_scheme_agreement", agree, 0.0, PV_AGREEMENT_TOL,
                                agree <= PV_AGREEMENT_TOL, alpha=a), t0)
            if cfg.which in ("I2", "both"):
                t0 = time.perf_counter()
                try:
                    res = integrate_I2(a, cfg.tol)
                    note = None
                except QuadratureError as exc:
                    res, note = exc.result, str(exc)
                target = TARGETS["I2"][1]
                ok = note is None and abs(res.value - target) <= cfg.tol
                self._add(Check("I2", res.value, target, cfg.tol, ok, alpha=a, note=note), t0)

    def _mc_alphas(self):
        return [a for a in self.cfg.alpha_grid if ALPHA_FLOOR <= a <= SAMPLER_MAX_ALPHA]

    # -- Monte Carlo
    def mc_signs(self, bridge: bool = False):
        cfg = self.cfg
        for a in self._mc_alphas():
            t0 = time.perf_counter()
            m = self._pair_moments(a)
            self._add(_mc_check("pair_product", m.pair_product, a), t0)
            for name in ("pair_orthant", "x1_s_product", "x1_s_orthant"):
                self._add(_mc_check(name, getattr(m, name), a), time.perf_counter())
            if a == 2.0:
                self._add(_mc_check("gauss_pair_product", m.pair_product, a), time.perf_counter())
                self._add(_mc_check("gauss_x1_s_product", m.x1_s_product, a), time.perf_counter())
            if bridge and a in self._i1:
                # (2/pi^2) * I1 is the sign covariance
                t0 = time.perf_counter()
                implied = 2.0 * self._i1[a] / math.pi**2
                tol = 3.0 * m.pair_product.std_error
                self._add(Check("I1_mc_bridge", m.pair_product.mean, implied, tol,
                                abs(m.pair_product.mean - implied) <= tol, alpha=a,
                                std_error=m.pair_product.std_error), t0)
            for n in cfg.n_values:
                t0 = time.perf_counter()
                est = estimate_n_product(a, n, cfg.trials, cfg.seed, workers=cfg.workers)
                target = 1.0 / (n + 1) if n % 2 == 0 else 0.0
                self._add(_mc_check("n_product", est, a, n=n, target=target), t0)

    # -- paintbox
    def paintbox(self):
        cfg = self.cfg
        ns = sorted(set(cfg.n_values))
        for n in ns:
            t0 = time.perf_counter()
            p = all_even_probability(n)
            expected = Fraction(1, n + 1) if n % 2 == 0 else Fraction(0)
            self._add(Check("paintbox_all_even_exact", str(p), str(expected), 0.0, p == expected, n=n), t0)
        for n in ns:
            t0 = time.perf_counter()
            est = simulate_paintbox(n, cfg.trials, cfg.seed)
            exact = float(all_even_probability(n))
            tol = max(MC_TOLERANCE, MC_SIGMAS * est.all_even_std_error)
            self._add(Check("paintbox_all_even_mc", est.all_even_frequency, exact, tol,
                            abs(est.all_even_frequency - exact) <= tol, n=n,
                            std_error=est.all_even_std_error), t0)
        if cfg.ks_m > 0:
            t0 = time.perf_counter()
            ks = definetti_uniformity_stat(cfg.ks_m, cfg.ks_replicates, RngStream(cfg.seed, 2**32))
            self._add(Check("definetti_ks", ks, 0.0, KS_THRESHOLD, ks <= KS_THRESHOLD), t0)

    # -- divide and color
    def dac(self):
        cfg = self.cfg
        exact = dac_pmf()
        for a in self._mc_alphas():
            t0 = time.perf_counter()
            m = self._pair_moments(a)
            dev = m.pmf.max_deviation(exact)
            self._add(Check("dac_max_deviation", dev, 0.0, DAC_TOLERANCE, dev <= DAC_TOLERANCE, alpha=a), t0)
            t0 = time.perf_counter()
            bad = m.pmf.forbidden_count()
            self._add(Check("dac_forbidden_count", bad, 0, 0.0, bad == 0, alpha=a), t0)


def run(config: RunConfig) -> Report:
    cfg = config.validate()
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    r = _Runner(cfg)
    if cfg.command == "integrate":
        r.integrals()
    elif cfg.command == "mc-signs":
        r.mc_signs()
    elif cfg.command == "paintbox":
        r.paintbox()
    elif cfg.command == "dac-check":
        r.dac()
    else:
        r.integrals()
        r.mc_signs(bridge=True)
        r.paintbox()
        r.dac()
    return Report(cfg.echo(), r.checks, r.runtimes, workers=cfg.workers, started_at=started)

