"""Timing comparison of the compiled clustering kernels vs the NumPy fallback.

Usage:
    python benchmarks/bench_kernels.py [--repeats 5]

Benchmarks the two hot loops behind ``cluster_mse`` and ``cluster_exact``:
the fused Lloyd assignment pass and the exhaustive square-error minimizer.
"""

import argparse
import time

import numpy as np

from blockembed.kernels import available_backends

LLOYD_CASES = [  # (n, m, k)
    (2_000, 4, 2),
    (10_000, 4, 3),
    (50_000, 2, 5),
]

EXACT_CASES = [  # (n, k) with k**n labelings
    (12, 2),  # 4_096
    (18, 2),  # 262_144
    (12, 3),  # 531_441
    (14, 3),  # 4_782_969
]


def _time(fn, *args, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_lloyd(backends, repeats):
    print("\nLloyd assignment pass (one iteration)")
    print(f"{'case':>18}  " + "".join(f"{name:>12}" for name in backends) + "   speedup")
    rng = np.random.default_rng(0)
    for n, m, k in LLOYD_CASES:
        z = np.ascontiguousarray(rng.normal(size=(n, m)))
        centroids = np.ascontiguousarray(z[:k])
        times = {
            name: _time(fns["lloyd_iteration"], z, centroids, repeats=repeats)
            for name, fns in backends.items()
        }
        row = f"n={n} m={m} k={k}".rjust(18)
        row += "".join(f"{times[name] * 1e3:>10.2f}ms" for name in backends)
        if "compiled" in times:
            row += f"   {times['numpy'] / times['compiled']:.1f}x"
        print(row)


def bench_exact(backends, repeats):
    print("\nExhaustive square-error minimizer")
    print(f"{'case':>18}  " + "".join(f"{name:>12}" for name in backends) + "   speedup")
    rng = np.random.default_rng(1)
    for n, k in EXACT_CASES:
        z = np.ascontiguousarray(rng.normal(size=(n, 2)))
        times = {
            name: _time(fns["exact_min_sse"], z, k, repeats=repeats)
            for name, fns in backends.items()
        }
        row = f"n={n} k={k} ({k**n})".rjust(18)
        row += "".join(f"{times[name] * 1e3:>10.2f}ms" for name in backends)
        if "compiled" in times:
            row += f"   {times['numpy'] / times['compiled']:.1f}x"
        print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    backends = available_backends()
    print("backends:", ", ".join(backends))
    if "compiled" not in backends:
        print("compiled extension unavailable; timing the fallback only")
    bench_lloyd(backends, args.repeats)
    bench_exact(backends, args.repeats)


if __name__ == "__main__":
    main()
