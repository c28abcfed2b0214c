#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Sizes mirror the workloads in the package: (members, nodes) around (6, 6) for
small finite groups, (55, 405) for the SU(2) grid at jmax=2, (21, 64) for the
circle, and (7, 65536) for the Iwasawa product grid.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from grouplab import _kernels

SIZES = [(6, 6), (21, 64), (55, 405), (7, 65536)]


def bench(fn, args, repeat):
    fn(*args)  # warm-up / jit compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=20, help="timing repetitions")
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<14} {'members x nodes':<16} {'numpy':>12} {'numba':>12} {'ratio':>8}")
    for m, k in SIZES:
        members = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
        w = rng.random(k)
        w /= w.sum()
        f = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        coeffs = rng.standard_normal(m) + 1j * rng.standard_normal(m)

        cases = [
            ("inner", (members[0], members[-1], w),
             _kernels.weighted_inner_numpy, _kernels.weighted_inner_numba),
            ("coefficients", (members, w, f),
             _kernels.coefficients_numpy, _kernels.coefficients_numba),
            ("gram", (members, w),
             _kernels.gram_numpy, _kernels.gram_numba),
            ("combine", (coeffs, members),
             _kernels.combine_numpy, _kernels.combine_numba),
        ]
        for name, case_args, np_fn, nb_fn in cases:
            got_np = np.asarray(np_fn(*case_args))
            got_nb = np.asarray(nb_fn(*case_args))
            assert np.max(np.abs(got_np - got_nb)) < 1e-10, f"{name} backends disagree"
            t_np = bench(np_fn, case_args, args.repeat)
            t_nb = bench(nb_fn, case_args, args.repeat)
            print(
                f"{name:<14} {f'{m} x {k}':<16} {t_np * 1e6:>10.1f}us {t_nb * 1e6:>10.1f}us "
                f"{t_np / t_nb:>7.2f}x"
            )


if __name__ == "__main__":
    main()
