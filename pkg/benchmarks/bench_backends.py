"""Benchmark: compiled kernels vs the pure-Python fallback.

Run from the repository root:

    python benchmarks/bench_backends.py

Covers the two hot paths: log-space Stirling-type triangle recursions (the
O(m^2) row build behind the exact new-species pmf) and the sequential
seating loops behind the Monte Carlo checks.
"""

import time

import numpy as np

from pdrich.backend import get_kernels


def _time(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    try:
        backends = {"cython": get_kernels("cython"), "python": get_kernels("python")}
    except ImportError:
        print("compiled backend unavailable; build it with: python setup.py build_ext --inplace")
        return

    rng = np.random.default_rng(0)
    u_crp = rng.random((20_000, 99))
    u_cont = rng.random((20_000, 50))
    base = np.arange(1, 6, dtype=np.int64)

    cases = [
        ("stirling1 table, n=400", lambda k: k.stirling1_table(400, 0.5)),
        ("noncentral row, m=3000", lambda k: k.noncentral1_row(3000, 0.5, 1.5)),
        ("crp K_n, 2e4 runs, n=100", lambda k: k.crp_kn_batch(0.5, 0.5, 100, u_crp)),
        ("continue, 2e4 runs, m=50", lambda k: k.continue_counts_fixed(base, 0.5, 0.5, 50, u_cont)),
    ]

    print(f"{'case':<30} {'cython':>10} {'python':>10} {'speedup':>9}")
    for name, fn in cases:
        times = {b: _time(lambda k=kmod: fn(k)) for b, kmod in backends.items()}
        speedup = times["python"] / times["cython"]
        print(f"{name:<30} {times['cython']:>9.3f}s {times['python']:>9.3f}s {speedup:>8.1f}x")


if __name__ == "__main__":
    main()
