"""Time the numba kernels against their numpy twins and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numba side is warmed up once before timing, so compile time is excluded.
"""

import argparse
import math
import time

import numpy as np

from maassperiods import kernels
from maassperiods._accel import NUMBA_AVAILABLE

R = 13.779751351890738


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(rng):
    xs = rng.uniform(0.5, 60.0, 20_000)
    table = kernels.build_table(R, 1.0, math.pi * R / 2 + 45)
    tx = rng.uniform(1.0, 60.0, 200_000)
    px = rng.uniform(-3.0, 3.0, 200_000)
    py = rng.uniform(0.01, 0.5, 200_000)
    b = rng.standard_normal(64)
    b[0] = 1.0
    sx = rng.uniform(-0.5, 0.5, 20_000)
    sy = rng.uniform(0.9, 2.0, 20_000)
    return [
        ("kbessel 20k", lambda: kernels.kbessel_array_nb(R, xs), lambda: kernels.kbessel_array_np(R, xs)),
        ("table 200k", lambda: kernels.table_eval_nb(table.log_lo, table.inv_width, table.coef, tx),
         lambda: kernels.table_eval_np(table, tx)),
        ("reduce 200k", lambda: kernels.reduce_points_nb(px, py, 10_000)[:2],
         lambda: kernels.reduce_points_np(px, py, 10_000)[:2]),
        ("series 20k x 64", lambda: kernels.series_values_nb(sx, sy, b, False, R, table.log_lo, table.inv_width,
                                                             table.coef, table.x_lo, table.x_hi, True, 10_000)[0],
         lambda: kernels.series_values_np(sx, sy, b, False, R, table, True, 10_000)[0]),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, nb, npf in cases(rng):
        nb()  # compile
        t_nb, a = best_of(nb, args.repeat)
        t_np, b = best_of(npf, max(1, args.repeat // 2))
        a = np.concatenate([np.ravel(v) for v in a]) if isinstance(a, tuple) else np.ravel(a)
        b = np.concatenate([np.ravel(v) for v in b]) if isinstance(b, tuple) else np.ravel(b)
        diff = float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
        print(f"{name:<18}{1e3 * t_nb:>12.2f}{1e3 * t_np:>12.2f}{t_np / t_nb:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
