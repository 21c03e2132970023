#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy reference backend.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

The engine selects the backend at import time via KBWALK_NO_NUMBA; here both
backends are imported directly so one process can time the pair side by side.
"""

import argparse
import time

import numpy as np

from kbwalk.kernels import _numpy_backend

try:
    from kbwalk.kernels import _numba_backend
except ImportError:
    _numba_backend = None


def _unit_rows(rng, n, dim):
    m = rng.normal(size=(n, dim))
    m /= np.linalg.norm(m, axis=1, keepdims=True)
    return np.ascontiguousarray(m)


def bench(fn, args, repeats):
    fn(*args)  # warm-up (and JIT compile for the numba path)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = {
        "relaxed_wmd (8x256 vs 12x256)": (
            "relaxed_wmd", (_unit_rows(rng, 8, 256), _unit_rows(rng, 12, 256))),
        "relaxed_wmd (64x256 vs 64x256)": (
            "relaxed_wmd", (_unit_rows(rng, 64, 256), _unit_rows(rng, 64, 256))),
        "batch_cosine (5000x256)": (
            "batch_cosine", (_unit_rows(rng, 5000, 256),
                             _unit_rows(rng, 1, 256)[0])),
        "softmax_weights (n=50)": (
            "softmax_weights", (rng.normal(size=50), 1.0)),
    }

    print(f"{'case':<34} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for label, (name, call_args) in cases.items():
        t_np = bench(getattr(_numpy_backend, name), call_args, args.repeats)
        if _numba_backend is None:
            print(f"{label:<34} {t_np * 1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_nb = bench(getattr(_numba_backend, name), call_args, args.repeats)
        print(f"{label:<34} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us "
              f"{t_np / t_nb:>8.2f}x")


if __name__ == "__main__":
    main()
