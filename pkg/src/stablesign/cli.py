"""Command-line front end.

    stablesign report --alpha-grid 0.5,1,1.5 --trials 1000000 --seed 42 --tol 1e-6
    stablesign integrate --which I1 --alpha-grid 0.25,1,4
    stablesign paintbox --n 2,4,6

Exit status: 0 all checks pass, 1 some check failed, 2 usage or config error.
``STABLESIGN_SEED`` overrides the default seed.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .report import COMMANDS, ConfigError, RunConfig, run

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SEED_ENV = "STABLESIGN_SEED"


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return RunConfig.seed
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}")


def build_parser(default_seed: int) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stablesign", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    d = RunConfig()
    for name in COMMANDS:
        sp = sub.add_parser(name)
        # allow_abbrev would let "--alpha" through; keep names exact
        sp.allow_abbrev = False
        sp.add_argument("--alpha-grid", type=_floats, default=d.alpha_grid)
        sp.add_argument("--trials", type=int, default=d.trials)
        sp.add_argument("--seed", type=int, default=default_seed)
        sp.add_argument("--tol", type=float, default=d.tol)
        sp.add_argument("--n", dest="n_values", type=_ints, default=d.n_values)
        sp.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
        sp.add_argument("--output", dest="output_path", default=None)
        sp.add_argument("--which", choices=("I1", "I2", "both"), default="both")
        sp.add_argument("--ks-m", type=int, default=d.ks_m,
                        help="elements per de Finetti replicate; 0 skips the KS check")
        sp.add_argument("--ks-replicates", type=int, default=d.ks_replicates)
        sp.add_argument("--workers", type=int, default=1, help="threads for Monte Carlo chunks")
    return p


def main(argv=None) -> int:
    try:
        seed = _default_seed()
    except ConfigError as exc:
        print(f"stablesign: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser(seed)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    config = RunConfig(**vars(args))
    try:
        report = run(config)
    except ConfigError as exc:
        print(f"stablesign: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report.to_json() if config.output_format == "json" else report.to_csv()
    if config.output_path:
        Path(config.output_path).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
