#!/usr/bin/env python3
"""Benchmark the compiled candidate-table kernel against the numpy fallback.

The kernel computes, for every community pair (i, j), the minimum over the
time window of q_t + 2*(e_t[i,j] - a[i]*a[j]); it dominates greedy optimiser
runtime once the window holds more than a handful of times.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from stabnet import _slowkern

try:
    from stabnet import _fastkern
except ImportError:
    _fastkern = None

SHAPES = [  # (window size s, communities c)
    (5, 34),
    (20, 34),
    (60, 125),
    (120, 125),
    (60, 256),
    (120, 256),
]


def make_inputs(rng, s, c):
    e = rng.random((s, c, c))
    e = (e + e.transpose(0, 2, 1)) / 2
    e /= e.sum(axis=(1, 2), keepdims=True)
    a = np.ascontiguousarray(e[0].sum(axis=1))
    qv = rng.random(s)
    return np.ascontiguousarray(e), a, qv


def bench(fn, args, repeats):
    fn(*args)  # warm-up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'s':>4} {'c':>4} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for s, c in SHAPES:
        e, a, qv = make_inputs(rng, s, c)
        slow = bench(_slowkern.min_candidate, (e, a, a, qv), args.repeats)
        if _fastkern is None:
            print(f"{s:>4} {c:>4} {slow * 1e3:>12.3f} {'n/a':>12} {'n/a':>8}")
            continue
        fast = bench(_fastkern.min_candidate, (e, a, a, qv), args.repeats)
        if not np.allclose(
            _fastkern.min_candidate(e, a, a, qv),
            _slowkern.min_candidate(e, a, a, qv),
            atol=1e-12,
        ):
            raise SystemExit(f"backend mismatch at s={s}, c={c}")
        print(
            f"{s:>4} {c:>4} {slow * 1e3:>12.3f} {fast * 1e3:>12.3f} "
            f"{slow / fast:>7.1f}x"
        )


if __name__ == "__main__":
    main()
