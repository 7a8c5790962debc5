"""Try to add an eighth cylinder to a certified configuration.

A sweep with no certified extension is evidence of maximality, never a proof.

    python scripts/maximality_sweep.py data/unit_d3_n7.json --seeds 10000
"""

import argparse
import time

from tangent_cylinders.config_io import load
from tangent_cylinders.solver import SearchSpec, extend_configuration


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("path")
    ap.add_argument("--seeds", type=int, default=10_000)
    ap.add_argument("--first", type=int, default=0)
    args = ap.parse_args()

    base = load(args.path)
    spec = SearchSpec(base.dimension, len(base) + 1, unit=base.unit, seeds=range(args.first, args.first + args.seeds), stop_on_certified=True)
    t0 = time.perf_counter()
    report = extend_configuration(base, spec)
    elapsed = time.perf_counter() - t0
    if report.certified:
        print(f"extension found at seed {report.seed} (max gap {report.max_gap:.2e}), {elapsed:.0f}s")
    else:
        print(f"no extension found in {args.seeds} seeds; best max gap {report.max_gap:.3e} (seed {report.seed}), {elapsed:.0f}s")


if __name__ == "__main__":
    main()
