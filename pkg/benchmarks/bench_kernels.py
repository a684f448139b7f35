#!/usr/bin/env python3
"""Benchmark the shifted-Hessenberg resolvent kernel: numba vs pure numpy.

The kernel is the per-frequency inner loop of every spectrum evaluation,
so its throughput sets the wall time of multi-point runs.  Sizes mirror
real use: n = dim^2 for photon cutoffs 1 and 2, plus one block-sized
case.  Run:

    python benchmarks/bench_kernels.py [--shifts N]

Set QDCAV_DISABLE_NUMBA=1 to confirm the package falls back cleanly.
"""

import argparse
import time

import numpy as np

from qdcav._kernels import NUMBA_AVAILABLE, resolvent_weights

CASES = (
    ("block (p_max=2, dK=+1)", 254),
    ("full (p_max=1)", 1024),
    ("full (p_max=2)", 2304),
)


def make_problem(n, n_shifts, seed=0):
    rng = np.random.default_rng(seed)
    h = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), -1)
    # keep shifts away from the spectrum so every solve is well posed
    h -= (np.abs(h).max() * 1j) * np.eye(n)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    shifts = rng.uniform(1.0, 2.0, n_shifts) + 1j * rng.uniform(-1.0, 1.0, n_shifts)
    return h, shifts, b, a


def time_path(h, shifts, b, a, use_numba, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        resolvent_weights(h, shifts, b, a, use_numba=use_numba)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shifts", type=int, default=20,
                        help="shifts (grid points) per measurement")
    args = parser.parse_args()

    print(f"numba available: {NUMBA_AVAILABLE}")
    print(f"{'case':26s} {'n':>6s} {'numpy ms/pt':>12s} {'numba ms/pt':>12s} {'speedup':>8s}")
    for label, n in CASES:
        n_shifts = args.shifts if n < 2000 else max(4, args.shifts // 4)
        h, shifts, b, a = make_problem(n, n_shifts)
        if NUMBA_AVAILABLE:
            # trigger compilation outside the timed region
            resolvent_weights(h, shifts[:1], b, a, use_numba=True)
        t_np = time_path(h, shifts, b, a, use_numba=False) / n_shifts
        if NUMBA_AVAILABLE:
            t_nb = time_path(h, shifts, b, a, use_numba=True) / n_shifts
            print(f"{label:26s} {n:6d} {t_np * 1e3:12.2f} {t_nb * 1e3:12.2f} "
                  f"{t_np / t_nb:7.1f}x")
        else:
            print(f"{label:26s} {n:6d} {t_np * 1e3:12.2f} {'n/a':>12s} {'n/a':>8s}")


if __name__ == "__main__":
    main()
