#!/usr/bin/env python3
"""Benchmark the compiled bit kernels against the numpy fallback.

Times the operations that dominate the package's hot paths: the
all-pairs codeword distance scan behind gamma / pure error scans,
Hamming distance matrices, sign-packed dot products, and sign
unpacking. Run after an editable install:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from qfp._kernels import _bitops_py

try:
    from qfp._kernels import _bitops_cy
except ImportError:
    _bitops_cy = None


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_words(rng, rows, nbits):
    words = rng.integers(0, 2 ** 64, size=(rows, (nbits + 63) // 64),
                         dtype=np.uint64)
    rem = nbits % 64
    if rem:
        words[:, -1] &= np.uint64((1 << rem) - 1)
    return words


def main():
    rng = np.random.default_rng(0)
    table = random_words(rng, 1024, 1024)      # gamma-scan scale (n+k=10, d=10)
    half = random_words(rng, 512, 1024)
    v = np.ascontiguousarray(rng.standard_normal(1024)
                             + 1j * rng.standard_normal(1024))

    one_row = np.ascontiguousarray(table[:1])

    def mc_loop(impl):
        # Monte Carlo usage: one codeword at a time, many iterations
        for _ in range(2000):
            impl.signed_dots(one_row, 1024, v)

    cases = [
        ("pair_max_abs_dev 1024x1024b",
         lambda impl: impl.pair_max_abs_dev(table, 512)),
        ("hamming_matrix 512^2 x1024b",
         lambda impl: impl.hamming_matrix(half, half)),
        ("signed_dots 1024rows x1024d",
         lambda impl: impl.signed_dots(table, 1024, v)),
        ("signed_dots 2000x single row", mc_loop),
        ("unpack_signs 1024x1024",
         lambda impl: impl.unpack_signs(table, 1024)),
        ("popcounts 1024 rows",
         lambda impl: impl.popcounts(table)),
    ]

    print(f"{'kernel':<30} {'pure (ms)':>10} {'compiled (ms)':>14} {'speedup':>8}")
    for name, call in cases:
        pure = timeit(lambda: call(_bitops_py)) * 1e3
        if _bitops_cy is None:
            print(f"{name:<30} {pure:>10.2f} {'n/a':>14} {'n/a':>8}")
            continue
        comp = timeit(lambda: call(_bitops_cy)) * 1e3
        print(f"{name:<30} {pure:>10.2f} {comp:>14.2f} {pure / comp:>7.1f}x")


if __name__ == "__main__":
    main()
