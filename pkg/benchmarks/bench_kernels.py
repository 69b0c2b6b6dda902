"""Time the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Each kernel runs once untimed first so numba compilation is excluded.
Outputs of the two flavours are compared before timing.
"""
import argparse
import time

import numpy as np

from deimcur import _kernels
from deimcur.densecore import DEPENDENCE_RTOL, EPS, TIE_RTOL


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def jacobi_case(n, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))

    def run(kern):
        B = np.asfortranarray(A.copy())
        W = np.asfortranarray(np.eye(n))
        assert kern.jacobi(B, W, np.sqrt(n) * EPS, 60) >= 0
        return np.sort(np.linalg.norm(B, axis=0))
    return run


def deim_case(m, k, seed):
    V, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((m, k)))

    def run(kern):
        p, failed = kern.deim(V, TIE_RTOL, DEPENDENCE_RTOL)
        assert failed == -1
        return p
    return run


def cpqr_case(m, n, k, seed):
    A = np.random.default_rng(seed).standard_normal((m, n))

    def run(kern):
        perm, failed = kern.cpqr(A, k, TIE_RTOL, 1e-12)
        assert failed == -1
        return perm
    return run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="small sizes only")
    args = ap.parse_args()
    cases = [("jacobi", "n=50", jacobi_case(50, 0)),
             ("deim", "m=2000 k=30", deim_case(2000, 30, 1)),
             ("cpqr", "200x200 k=30", cpqr_case(200, 200, 30, 2))]
    if not args.quick:
        cases += [("jacobi", "n=200", jacobi_case(200, 3)),
                  ("deim", "m=20000 k=60", deim_case(20000, 60, 4)),
                  ("cpqr", "2000x200 k=60", cpqr_case(2000, 200, 60, 5))]
    print(f"{'kernel':8} {'size':16} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for name, size, run in cases:
        a, b = run(_kernels.NUMPY), run(_kernels.NUMBA)
        if name == "jacobi":
            np.testing.assert_allclose(a, b, rtol=1e-12)
        else:
            np.testing.assert_array_equal(a, b)
        tn = best_of(lambda: run(_kernels.NUMPY), args.repeat)
        tb = best_of(lambda: run(_kernels.NUMBA), args.repeat)
        print(f"{name:8} {size:16} {1e3 * tn:12.2f} {1e3 * tb:12.2f} {tn / tb:8.1f}x")


if __name__ == "__main__":
    main()
