"""Compare the numba and numpy echelon backends on real slice matrices.

    python bench/benchmark.py [--p 2] [--k 2] [--weights 8 12 16] [--repeat 3]
"""

import argparse
import time

import numpy as np

from kutoral import kernels
from kutoral.solver import build_slice
from kutoral.tensor import ModuleContext


def slice_matrix(ctx, W):
    system = build_slice(ctx, W)
    A = system.column_matrix(range(len(system.basis)))
    return A, max(system.exponent, 1)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--weights", type=int, nargs="+", default=[8, 12, 16, 20])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    ctx = ModuleContext(args.p, 2, args.k)
    print(f"p={args.p} k={args.k}; backend available: numba={kernels.HAVE_NUMBA}")
    print(f"{'W':>4} {'rows':>6} {'cols':>6} {'N':>3} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for W in args.weights:
        A, N = slice_matrix(ctx, W)
        if args.p**N >= kernels.INT64_SAFE_MODULUS:
            print(f"{W:>4} modulus p^{N} too large for int64, skipped")
            continue
        if kernels.HAVE_NUMBA:
            kernels.echelon(A, A.shape[1], args.p, N, force="numba")  # compile
        t_nb, (w1, p1) = best_of(lambda: kernels.echelon(A, A.shape[1], args.p, N, force="numba"), args.repeat)
        t_np, (w2, p2) = best_of(lambda: kernels.echelon(A, A.shape[1], args.p, N, force="numpy"), args.repeat)
        assert sorted(v for *_x, v in p1) == sorted(v for *_x, v in p2)
        print(f"{W:>4} {A.shape[0]:>6} {A.shape[1]:>6} {N:>3} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>8.1f}")


if __name__ == "__main__":
    main()
