"""Benchmark the 7-point stencil matvec: numba kernel vs numpy fallback.

The matvec dominates solver runtime (hundreds of CG iterations per Picard
sweep), so this is the number that decides wall-clock time.  Run as

    python benchmarks/bench_stencil.py [n]

with n the nodes per axis (default 129, the acceptance-scale grid).  The
backend of the installed package follows PCAPFLOW_NO_NUMBA; this script
times both implementations explicitly.
"""

import sys
import time

import numpy as np

from pcapflow import _kernels


def build_problem(n):
    rng = np.random.default_rng(0)
    u = rng.normal(size=(n, n, n))
    diag = rng.uniform(1.0, 7.0, size=(n, n, n))
    cx = rng.uniform(0.5, 1.0, size=(n - 1, n, n))
    cy = rng.uniform(0.5, 1.0, size=(n, n - 1, n))
    cz = rng.uniform(0.5, 1.0, size=(n, n, n - 1))
    out = np.empty_like(u)
    return u, diag, cx, cy, cz, out


def time_fn(fn, args, repeat=20):
    fn(*args)  # warm-up (and jit compile)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 129
    args = build_problem(n)
    nodes = n**3

    t_numpy = time_fn(_kernels._stencil_apply_numpy, args)
    rows = [("numpy", t_numpy)]
    if _kernels.HAVE_NUMBA:
        t_numba = time_fn(_kernels._stencil_apply_numba, args)
        rows.append(("numba", t_numba))

    print(f"stencil matvec, {n}^3 = {nodes:,} nodes")
    for name, t in rows:
        print(f"  {name:6s} {t * 1e3:8.2f} ms/apply   {nodes / t / 1e6:8.1f} Mnode/s")
    if len(rows) == 2:
        print(f"  speedup numba/numpy: {rows[0][1] / rows[1][1]:.2f}x")


if __name__ == "__main__":
    main()
