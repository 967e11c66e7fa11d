"""Compare the compiled and numpy power-iteration kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--restarts 200]

Both backends receive identical matrices and start vectors; the table shows
the best wall time of each and the largest gap between their gains.
"""

import argparse
import math
import time

import numpy as np

from ovpframe import _core
from ovpframe.pspace import norm_spec

CASES = [
    # (rows, cols, dom, cod)
    (6, 6, 1.5, 3.0),
    (8, 8, 3.0, 1.5),
    (16, 6, 3.0, (4, 4, 1.5, 2.0)),
    (6, 16, (4, 4, 1.5, 2.0), 3.0),
    (24, 8, 3.0, (6, 4, 1.5, math.inf)),
    (48, 48, 1.5, 1.5),
]


def best_time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--restarts", type=int, default=200)
    ap.add_argument("--steps", type=int, default=200)
    args = ap.parse_args(argv)

    if _core._compiled is None:
        print("compiled kernel unavailable; only the numpy backend can run")
    rng = np.random.default_rng(0)
    print(f"{'shape':>8} {'dom':>20} {'cod':>20} {'python ms':>10} {'cython ms':>10} {'speedup':>8} {'gain gap':>9}")
    for m, n, dom, cod in CASES:
        T = rng.standard_normal((m, n))
        starts = rng.standard_normal((n, args.restarts))
        ds, cs = norm_spec(dom, n), norm_spec(cod, m)
        tp, (gp, _, _) = best_time(
            lambda: _core.power_gain(T, starts, ds, cs, args.steps, 1e-12, backend="python"), args.repeat
        )
        if _core._compiled is not None:
            tc, (gc, _, _) = best_time(
                lambda: _core.power_gain(T, starts, ds, cs, args.steps, 1e-12, backend="cython"), args.repeat
            )
            speed, gap = f"{tp / tc:8.1f}", f"{abs(gp - gc) / gp:9.1e}"
            tc_ms = f"{tc * 1e3:10.2f}"
        else:
            speed, gap, tc_ms = f"{'-':>8}", f"{'-':>9}", f"{'-':>10}"
        print(f"{m:>3}x{n:<4} {str(ds):>20} {str(cs):>20} {tp * 1e3:10.2f} {tc_ms} {speed} {gap}")


if __name__ == "__main__":
    main()
