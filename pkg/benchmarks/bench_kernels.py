"""Timing comparison of the compiled and plain kernel implementations.

Runs the Jacobi eigensolver sweep and the stage-1 restricted elimination
over batches of random saddle systems through both code paths in one
process; the compiled path is skipped when numba is unavailable or the
kernels were forced plain via CURVSQP_PURE_NUMPY.

    python benchmarks/bench_kernels.py [--sizes 8,16,24] [--repeat 200]
"""

import argparse
import time

import numpy as np

from curvsqp import _kernels
from curvsqp.factor import build_kkt


def _make_batch(rng, n, m, count):
    batch = []
    for _ in range(count):
        A = rng.normal(size=(n, n))
        H = 0.5 * (A + A.T)
        J = rng.normal(size=(m, n))
        batch.append((H, J, 0.1))
    return batch


def _time_jacobi(kernel, mats):
    start = time.perf_counter()
    for A in mats:
        work = A.copy()
        V = np.eye(A.shape[0])
        tol = 1e-12 * float(np.linalg.norm(work, "fro"))
        kernel(work, V, tol, 100)
    return time.perf_counter() - start


def _time_stage1(kernel, batch):
    start = time.perf_counter()
    for H, J, mu in batch:
        kkt = build_kkt(H, J, mu)
        N = kkt.K.shape[0]
        A = kkt.K.copy()
        L = np.eye(N)
        perm = np.arange(N)
        ptype = np.zeros(N, dtype=np.int64)
        psize = np.zeros(N, dtype=np.int64)
        tiny = 1e-12 * (1.0 + float(np.max(np.abs(kkt.K))))
        kernel(A, L, perm, ptype, psize, H.shape[0], tiny)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="8,16,24")
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(0)
    paths = [("plain", _kernels.jacobi_plain, _kernels.stage1_plain)]
    if _kernels.USING_NUMBA:
        # trigger compilation outside the timed region
        warm = _make_batch(rng, 4, 2, 1)
        _time_jacobi(_kernels.jacobi_kernel, [warm[0][0]])
        _time_stage1(_kernels.stage1_kernel, warm)
        paths.append(("numba", _kernels.jacobi_kernel, _kernels.stage1_kernel))
    else:
        print("numba path unavailable; timing the plain path only")

    header = f"{'kernel':<10} {'n':>4} {'path':<7} {'total s':>10} {'per call us':>12}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        mats = [0.5 * (A + A.T) for A in rng.normal(size=(args.repeat, n, n))]
        batch = _make_batch(rng, n, max(1, n // 3), args.repeat)
        for name, jac, st1 in paths:
            t = _time_jacobi(jac, mats)
            print(f"{'jacobi':<10} {n:>4} {name:<7} {t:>10.4f} {1e6 * t / args.repeat:>12.1f}")
        for name, jac, st1 in paths:
            t = _time_stage1(st1, batch)
            print(f"{'stage1':<10} {n:>4} {name:<7} {t:>10.4f} {1e6 * t / args.repeat:>12.1f}")


if __name__ == "__main__":
    main()
