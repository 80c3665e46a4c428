"""Acceptance criteria. Each test records one pass/fail line, printed in the
terminal summary under "acceptance criteria"."""
import json
import math
import time
from fractions import Fraction

import numpy as np

from stablesign.dac_model import compare_mc_vs_dac, dac_pmf_exact
from stablesign.paintbox import _all_even, all_even_probability, definetti_uniformity_stat, simulate_paintbox
from stablesign.quadrature import PI, integrate_I2, pv_excision_I1, pv_fold_I1, pv_integrate_I1
from stablesign.report import KS_THRESHOLD, RunConfig, run
from stablesign.sign_mc import FORBIDDEN, estimate_n_product, estimate_pair_moments, estimate_sign_vector_pmf
from stablesign.stable_sampler import RngStream, empirical_cf, empirical_cf_sine, sample_sas, sample_threshold_arrays, threshold_x

GRID = [0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 1.9, 2, 2.5, 3, 4]
TRIALS = 10**6
SEED = 20240601
MC_TOL = 0.005


def test_01_integral_one(record_criterion):
    start = time.perf_counter()
    worst = max(abs(pv_integrate_I1(a, 1e-6).value - PI**2 / 6) for a in GRID)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 5
    record_criterion(1, "I1 principal value = pi^2/6 on grid", ok, f"max err {worst:.2e} <= 1e-6, {elapsed:.2f}s")
    assert ok


def test_02_integral_two(record_criterion):
    start = time.perf_counter()
    worst = max(abs(integrate_I2(a, 1e-6).value - PI**2 / 4) for a in GRID)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 5
    record_criterion(2, "I2 = pi^2/4 on grid", ok, f"max err {worst:.2e} <= 1e-6, {elapsed:.2f}s")
    assert ok


def test_03_pv_scheme_agreement(record_criterion):
    worst = max(abs(pv_fold_I1(a).value - pv_excision_I1(a)[0].value) for a in GRID)
    ok = worst <= 1e-7
    record_criterion(3, "fold vs excision agreement", ok, f"max gap {worst:.2e} <= 1e-7")
    assert ok


def test_04_pair_moments(record_criterion):
    targets = {"pair_product": 1 / 3, "x1_s_product": 1 / 2, "pair_orthant": 1 / 3, "x1_s_orthant": 3 / 8}
    worst, slowest = 0.0, 0.0
    for a in (0.5, 1.0, 1.5, 1.9):
        start = time.perf_counter()
        m = estimate_pair_moments(a, TRIALS, SEED)
        slowest = max(slowest, time.perf_counter() - start)
        for name, target in targets.items():
            worst = max(worst, abs(getattr(m, name).mean - target))
    ok = worst <= MC_TOL and slowest < 10
    record_criterion(4, "pair and X1-S sign moments", ok, f"max dev {worst:.4f} <= 0.005, {slowest:.2f}s/alpha")
    assert ok


def test_05_gaussian_anchor(record_criterion):
    m = estimate_pair_moments(2.0, TRIALS, SEED)
    d1 = abs(m.pair_product.mean - 2 / PI * math.asin(0.5))
    d2 = abs(m.x1_s_product.mean - 2 / PI * math.asin(1 / math.sqrt(2)))
    ok = max(d1, d2) <= MC_TOL
    record_criterion(5, "Gaussian anchor at alpha=2", ok, f"devs {d1:.4f}, {d2:.4f} <= 0.005")
    assert ok


def test_06_n_fold_moments(record_criterion):
    targets = {4: 1 / 5, 6: 1 / 7, 3: 0.0, 5: 0.0}
    devs = {n: abs(estimate_n_product(1.0, n, TRIALS, SEED).mean - t) for n, t in targets.items()}
    ok = max(devs.values()) <= MC_TOL
    detail = ", ".join(f"n={n}: {d:.4f}" for n, d in devs.items())
    record_criterion(6, "n-fold sign products at alpha=1", ok, detail + " <= 0.005")
    assert ok


def test_07_exact_recursion(record_criterion):
    start = time.perf_counter()
    _all_even.cache_clear()
    ok = all(all_even_probability(n) == (Fraction(1, n + 1) if n % 2 == 0 else 0) for n in range(41))
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1
    record_criterion(7, "all-even recursion exact for n <= 40", ok, f"zero tolerance, {elapsed:.3f}s")
    assert ok


def test_08_paintbox_stable_equivalence(record_criterion):
    zs = []
    for n in (2, 4):
        pb = simulate_paintbox(n, TRIALS, SEED + n)
        exact = float(all_even_probability(n))
        zs.append(abs(pb.all_even_frequency - exact) / pb.all_even_std_error)
        st = estimate_n_product(1.0, n, TRIALS, SEED + 10 * n)
        zs.append(abs(pb.all_even_frequency - st.mean) / math.hypot(pb.all_even_std_error, st.std_error))
    ok = max(zs) <= 3
    record_criterion(8, "paintbox vs recursion vs stable product", ok, f"max |z| {max(zs):.2f} <= 3")
    assert ok


def test_09_divide_and_color(record_criterion):
    exact = dac_pmf_exact()
    worst, forbidden = 0.0, 0
    for a in (0.5, 1.0, 1.5):
        worst = max(worst, compare_mc_vs_dac(a, TRIALS, SEED))
        pmf = estimate_sign_vector_pmf(a, TRIALS, SEED)
        forbidden += sum(pmf.counts[v] for v in FORBIDDEN)
    assert all(exact[v] == 0 for v in FORBIDDEN)
    ok = worst <= MC_TOL and forbidden == 0
    record_criterion(9, "divide-and-color pmf", ok, f"max dev {worst:.4f} <= 0.005, forbidden {forbidden}")
    assert ok


def test_10_cf_suite(record_criterion):
    bound = 4 / math.sqrt(TRIALS)
    worst = 0.0
    for a in (0.5, 1.0, 1.5, 2.0):
        direct = sample_sas(a, RngStream(SEED, 1), size=TRIALS)
        s, innov = sample_threshold_arrays(a, 1, TRIALS, RngStream(SEED, 2))
        x1 = threshold_x(a, s, innov)[:, 0]
        for t in (0.25, 0.5, 1.0, 2.0, 4.0):
            target = math.exp(-abs(t) ** a)
            for x in (direct, x1):
                worst = max(worst, abs(empirical_cf(x, t) - target), abs(empirical_cf_sine(x, t)))
    ok = worst <= bound
    record_criterion(10, "characteristic function suite", ok, f"max dev {worst:.5f} <= {bound:.3f}")
    assert ok


def test_11_definetti_uniformity(record_criterion):
    ks = definetti_uniformity_stat(10**4, 10**4, RngStream(SEED, 3))
    control = definetti_uniformity_stat(10**4, 10**4, RngStream(SEED, 4), single_box=True)
    ok = ks <= KS_THRESHOLD and control >= 0.4
    record_criterion(11, "mixing fractions uniform", ok,
                     f"KS {ks:.4f} <= {KS_THRESHOLD}, control {control:.3f} >= 0.4")
    assert ok


def test_12_report_determinism(record_criterion):
    first = run(RunConfig(command="report", seed=SEED, workers=1))
    second = run(RunConfig(command="report", seed=SEED, workers=4))
    a = json.dumps(first.deterministic(), indent=2).encode()
    b = json.dumps(second.deterministic(), indent=2).encode()
    ok = a == b and first.passed
    record_criterion(12, "report deterministic across runs and threads", ok,
                     f"{len(a)} bytes identical={a == b}, report pass={first.passed}")
    assert ok
