"""Hot numeric kernels: numba-jitted with a pure-numpy fallback.

The fallback is selected by setting PCAPFLOW_NO_NUMBA=1 in the environment
(or automatically when numba is unavailable).  Both paths compute identical
results; see benchmarks/bench_stencil.py for the speed comparison.

Reductions (dot products) deliberately stay in single-threaded numpy so that
runs are bit-reproducible; the jitted loops only do independent elementwise
writes.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("PCAPFLOW_NO_NUMBA", "").strip() not in ("", "0", "false")

try:  # pragma: no cover - import guard
    if _DISABLED:
        raise ImportError("numba disabled by PCAPFLOW_NO_NUMBA")
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA and not _DISABLED


def _stencil_apply_numpy(u, diag, cx, cy, cz, out):
    """out = diag*u - sum over faces of c_face * u_neighbor.

    cx/cy/cz hold face coefficients between node i and i+1 along each axis
    and are zero on faces touching fixed nodes, so no mask is needed here.
    """
    out[...] = diag * u
    out[:-1, :, :] -= cx * u[1:, :, :]
    out[1:, :, :] -= cx * u[:-1, :, :]
    out[:, :-1, :] -= cy * u[:, 1:, :]
    out[:, 1:, :] -= cy * u[:, :-1, :]
    out[:, :, :-1] -= cz * u[:, :, 1:]
    out[:, :, 1:] -= cz * u[:, :, :-1]
    return out


if USING_NUMBA:

    @njit(parallel=True, cache=True)
    def _stencil_apply_numba(u, diag, cx, cy, cz, out):  # pragma: no cover - jitted
        nx, ny, nz = u.shape
        for i in prange(nx):
            for j in range(ny):
                for k in range(nz):
                    v = diag[i, j, k] * u[i, j, k]
                    if i + 1 < nx:
                        v -= cx[i, j, k] * u[i + 1, j, k]
                    if i > 0:
                        v -= cx[i - 1, j, k] * u[i - 1, j, k]
                    if j + 1 < ny:
                        v -= cy[i, j, k] * u[i, j + 1, k]
                    if j > 0:
                        v -= cy[i, j - 1, k] * u[i, j - 1, k]
                    if k + 1 < nz:
                        v -= cz[i, j, k] * u[i, j, k + 1]
                    if k > 0:
                        v -= cz[i, j, k - 1] * u[i, j, k - 1]
                    out[i, j, k] = v
        return out

    def stencil_apply(u, diag, cx, cy, cz, out):
        return _stencil_apply_numba(u, diag, cx, cy, cz, out)

else:

    def stencil_apply(u, diag, cx, cy, cz, out):
        return _stencil_apply_numpy(u, diag, cx, cy, cz, out)


def dot(a: np.ndarray, b: np.ndarray) -> float:
    """Deterministic (pairwise, single-thread) inner product."""
    return float(np.sum(a * b))


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
