#!/usr/bin/env python3
"""Numba kernels against their numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py [--repeat N]

Each row times one kernel on both paths (median of N runs, after a warm-up
call that also triggers JIT compilation) and checks the outputs agree.
Run with numba installed; TRACETAILS_NO_NUMBA does not matter here since
both variants are called directly. On one core, numba wins on the
quadrature kernels (gammainc, fourier_sum, quad_breaks) and loses on the
normal generators, where scipy's vectorised ndtri beats a scalar loop.
"""
import argparse
import time

import numpy as np

from tracetails import _kernels


def _median_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def cases():
    rng = np.random.default_rng(0)
    idx = np.arange(2_000_000, dtype=np.uint64)
    spec = rng.exponential(size=20)
    x = 12.5 * rng.uniform(0.2, 2.0, 200_000)
    u = np.linspace(0.0, 200.0, 4000)
    c, sh = rng.uniform(0.01, 1.0, 30), rng.uniform(0.5, 3.0, 30)
    xs = np.linspace(-5.0, 5.0, 400)
    hw = np.exp(_kernels.log_cf_np(u, c, sh))
    return [
        ("normals 2e6", lambda k: k["normals"](7, 1, idx)),
        ("gammas 1e6 (shape 0.7)", lambda k: k["gammas"](7, 1, 0, 1_000_000, 0.7)),
        ("gammainc 2e5 (shape 12.5)", lambda k: k["gammainc"](12.5, x)),
        ("log_cf 4000 x 30", lambda k: k["log_cf"](u, c, sh)),
        ("fourier_sum 400 x 4000", lambda k: k["fourier_sum"](xs, u, hw)),
        ("quad_breaks [0, 1e3] x 30 terms", lambda k: k["quad_breaks"](0.0, 1e3, 5.0, c, c * sh, c * c * sh)),
        ("trace_estimates n=20 m=8 reps=2e4", lambda k: k["trace_estimates"](3, spec, 8, 20_000)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = ("normals", "gammas", "gammainc", "log_cf", "fourier_sum", "quad_breaks", "trace_estimates")
    nb = {n: getattr(_kernels, n + "_nb") for n in names}
    npy = {n: getattr(_kernels, n + "_np") for n in names}
    print(f"dispatch backend: {'numba' if _kernels.USE_NUMBA else 'numpy'}")
    print(f"{'kernel':38s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}  max rel diff")
    for label, call in cases():
        r_nb, r_np = call(nb), call(npy)
        diff = float(np.max(np.abs(r_nb - r_np) / np.maximum(np.abs(r_np), 1e-300)))
        t_nb = _median_time(lambda: call(nb), args.repeat)
        t_np = _median_time(lambda: call(npy), args.repeat)
        print(f"{label:38s} {1e3 * t_nb:11.2f} {1e3 * t_np:11.2f} {t_np / t_nb:8.1f}  {diff:.1e}")


if __name__ == "__main__":
    main()
