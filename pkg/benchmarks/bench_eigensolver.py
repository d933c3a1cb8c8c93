#!/usr/bin/env python3
"""Benchmark the jitted eigensolver kernels against the numpy fallback.

Both paths are imported explicitly, so no environment flag is needed here;
at runtime the package picks the jitted path unless WIGNERSIM_DISABLE_NUMBA
is set.  LAPACK timings are printed for context.

Usage: python benchmarks/bench_eigensolver.py [--sizes 128,256,512] [--reps 3]
"""

import argparse
import time

import numpy as np

from wignersim import _kernels as K


def _solve(tridiag, ql, a):
    d, e = tridiag(a)
    n = len(d)
    work = np.zeros(n)
    if n > 1:
        work[: n - 1] = e
    status = ql(d, work)
    if status != -1:
        raise RuntimeError(f"QL failed at index {status}")
    d.sort()
    return d


def bench(fn, matrices, reps):
    best = np.inf
    for _ in range(reps):
        t0 = time.perf_counter()
        for a in matrices:
            fn(a)
        best = min(best, (time.perf_counter() - t0) / len(matrices))
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="128,256,512,1024",
                        help="comma-separated matrix sizes")
    parser.add_argument("--reps", type=int, default=3,
                        help="timing repetitions (best is reported)")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not K.ACCELERATED:
        print("note: jit disabled by WIGNERSIM_DISABLE_NUMBA; "
              "'jit' column falls back to numpy")

    rng = np.random.default_rng(0)
    # warm up the jit compile outside the timed region
    _solve(K.householder_tridiag, K.ql_implicit, np.eye(8))

    print(f"{'n':>6} {'jit (s)':>10} {'numpy (s)':>10} {'speedup':>8} "
          f"{'lapack (s)':>11} {'max |diff|':>11}")
    for n in sizes:
        a = rng.standard_normal((n, n))
        a = (a + a.T) / np.sqrt(2 * n)
        t_jit = bench(lambda m: _solve(K.householder_tridiag, K.ql_implicit, m),
                      [a], args.reps)
        t_np = bench(lambda m: _solve(K.householder_tridiag_numpy,
                                      K.ql_implicit_numpy, m),
                     [a], args.reps)
        t_lapack = bench(np.linalg.eigvalsh, [a], args.reps)
        d_jit = _solve(K.householder_tridiag, K.ql_implicit, a)
        d_np = _solve(K.householder_tridiag_numpy, K.ql_implicit_numpy, a)
        diff = float(np.max(np.abs(d_jit - d_np)))
        print(f"{n:>6} {t_jit:>10.4f} {t_np:>10.4f} {t_np / t_jit:>8.2f} "
              f"{t_lapack:>11.4f} {diff:>11.2e}")


if __name__ == "__main__":
    main()
