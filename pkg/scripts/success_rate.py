"""Per-start success rate of lm_refine under different gauges, residual scalings
and init scales.

    python scripts/success_rate.py --d 3 --n 7 --seeds 2000
"""

import argparse
import itertools
import time
from collections import Counter

from tangent_cylinders.solver import Gauge, Normalization, SearchSpec, lm_refine, random_configuration


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--seeds", type=int, default=500)
    ap.add_argument("--max-iter", type=int, default=100)
    ap.add_argument("--scales", type=float, nargs="+", default=[1.0, 1.5])
    args = ap.parse_args()

    print(f"{'gauge':>9} {'residual':>8} {'scale':>5} {'certified':>9} {'rate':>7} {'time':>6}")
    for gauge, norm, scale in itertools.product(Gauge, Normalization, args.scales):
        spec = SearchSpec(
            args.d, args.n, max_iterations=args.max_iter, init_scale=scale, gauge=gauge, normalization=norm
        )
        t0 = time.perf_counter()
        counts = Counter()
        for seed in range(args.seeds):
            counts[lm_refine(random_configuration(spec, seed), spec, seed).status.value] += 1
        ok = counts["Certified"]
        print(f"{gauge.value:>9} {norm.value:>8} {scale:>5.2f} {ok:>9} {ok / args.seeds:>7.2%} {time.perf_counter() - t0:>5.0f}s")


if __name__ == "__main__":
    main()
