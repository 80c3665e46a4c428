"""Freeze the KS threshold for the de Finetti uniformity check.

Independent of the package's element-by-element simulation: box occupancies
are drawn directly as multinomial counts over the geometric masses, each box
coloured by a fair coin, and the +1 fraction is the coloured mass.

    python scripts/calibrate_ks.py
"""
import argparse
import json
import math

import numpy as np
from scipy.stats import kstest

BOXES = 53


def fractions(m, replicates, gen, rows=2000):
    masses = 0.5 ** np.arange(1, BOXES + 1)
    masses[-1] += 1.0 - masses.sum()
    out = []
    for start in range(0, replicates, rows):
        r = min(rows, replicates - start)
        counts = gen.multinomial(m, masses, size=r)
        colours = gen.integers(0, 2, size=(r, BOXES))
        out.append((counts * colours).sum(axis=1) / m)
    return np.concatenate(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=20261018)
    ap.add_argument("--replicates", type=int, default=10**5)
    ap.add_argument("--target-replicates", type=int, default=10**4)
    args = ap.parse_args()
    gen = np.random.default_rng(args.seed)
    rows = {}
    for m in (10, 10**2, 10**4, 10**5):
        rows[m] = kstest(fractions(m, args.replicates, gen), "uniform").statistic
    # KS 99% critical value at the acceptance sample size
    crit = 1.63 / math.sqrt(args.target_replicates)
    # the m = 1e4 distance at 1e5 replicates bounds the finite-m bias (plus
    # its own sampling noise, which only makes the bound more generous)
    threshold = math.ceil((rows[10**4] + crit) * 1000) / 1000
    print(json.dumps({
        "ks_by_m": {str(k): v for k, v in rows.items()},
        "crit99": crit,
        "threshold": threshold,
    }, indent=2))


if __name__ == "__main__":
    main()
