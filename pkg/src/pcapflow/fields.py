"""Derived node fields on grid solutions: gradients, curvature, frame data.

All differential operators act on the node arrays of a GridField with
centered second-order differences; the metric enters through the conformal
factor (orthonormal-frame components of a vector v are phi^-2 v_coordinate,
so euclidean-looking formulas apply verbatim in the frame).
"""

from __future__ import annotations

import numpy as np

from .epsilon import GridField, _face_phi2, node_gradient
from .errors import DomainError, ParameterError
from .geometry import (conformal_ric_normal, conformal_ric_tangent,
                       conformal_scalar_curvature)


def _centered(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.zeros_like(arr)
    sl_c, sl_p, sl_m = [slice(None)] * 3, [slice(None)] * 3, [slice(None)] * 3
    sl_c[axis] = slice(1, -1)
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(None, -2)
    out[tuple(sl_c)] = (arr[tuple(sl_p)] - arr[tuple(sl_m)]) / (2 * h)
    return out


def _second(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.zeros_like(arr)
    sl_c, sl_p, sl_m = [slice(None)] * 3, [slice(None)] * 3, [slice(None)] * 3
    sl_c[axis] = slice(1, -1)
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(None, -2)
    out[tuple(sl_c)] = (arr[tuple(sl_p)] - 2 * arr[tuple(sl_c)] + arr[tuple(sl_m)]) / h**2
    return out


def _mixed(arr: np.ndarray, ax1: int, ax2: int, h: float) -> np.ndarray:
    return _centered(_centered(arr, ax1, h), ax2, h)


class FieldData:
    """Lazy cache of derived node arrays for one GridField."""

    def __init__(self, f: GridField):
        self.f = f
        self._cache = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # -- first derivatives ----------------------------------------------------

    def du(self):
        return self._grad()[0]

    def _grad(self):
        return self._get("grad", lambda: node_gradient(self.f))

    def grad_norm(self):
        """|grad u|_g at nodes."""
        return self._grad()[1]

    def phi(self):
        return self.f.phi_nodes() if self.f.spec.is_radial else np.ones(self.f.shape)

    # -- second derivatives ----------------------------------------------------

    def laplace_beltrami(self):
        """Delta_g u with the same flux stencil as the solver (unit weight)."""
        def build():
            f = self.f
            face = _face_phi2(f)
            out = np.zeros(f.shape)
            h2 = f.h ** 2
            u = f.u
            for axis in range(3):
                sl_lo = [slice(None)] * 3
                sl_hi = [slice(None)] * 3
                sl_lo[axis] = slice(None, -1)
                sl_hi[axis] = slice(1, None)
                fl = face[axis] * (u[tuple(sl_hi)] - u[tuple(sl_lo)]) / h2
                out[tuple(sl_lo)] += fl
                out[tuple(sl_hi)] -= fl
            return out / self.phi() ** 6
        return self._get("lap", build)

    def hessian_frame(self):
        """Covariant Hessian of u in the g-orthonormal frame, (...,3,3).

        For g = phi^4 delta: Hess_ij = d2_ij u - Gamma^k_ij d_k u with
        Gamma^k_ij = 2(d_i^k a_j + d_j^k a_i - d_ij a_k), a = grad(ln phi^..),
        a_k = 2 (phi'/phi) x_k / r; frame components carry a phi^-4 factor.
        """
        def build():
            f = self.f
            h = f.h
            u = f.u
            H = np.zeros(f.shape + (3, 3))
            for a in range(3):
                H[..., a, a] = _second(u, a, h)
                for b in range(a + 1, 3):
                    m = _mixed(u, a, b, h)
                    H[..., a, b] = m
                    H[..., b, a] = m
            if f.spec.is_radial:
                ph = self.phi()
                # clamp like phi_nodes: values inside the excised ball are
                # never consumed, but must stay finite
                r = np.maximum(f.radii(), f.spec.r_min)
                dph = np.asarray(f.spec.dphi(r), dtype=float)
                ak = [2.0 * dph / ph * (ax / r) for ax in self._coords()]
                du = self._grad()[0]
                adotdu = sum(ak[k] * du[k] for k in range(3))
                for i in range(3):
                    for j in range(3):
                        H[..., i, j] -= ak[j] * du[i] + ak[i] * du[j]
                        if i == j:
                            H[..., i, j] += adotdu
                H /= ph[..., None, None] ** 4
            return H
        return self._get("hess", build)

    def _coords(self):
        xs, ys, zs = self.f.axes()
        shape = self.f.shape
        return (np.broadcast_to(xs[:, None, None], shape),
                np.broadcast_to(ys[None, :, None], shape),
                np.broadcast_to(zs[None, None, :], shape))

    # -- level-set geometry -----------------------------------------------------

    def grad_w(self):
        """Coordinate gradient of |grad u|_g (centered differences)."""
        def build():
            w = self.grad_norm()
            return [_centered(w, a, self.f.h) for a in range(3)]
        return self._get("gradw", build)

    def gradw_dot_gradu(self):
        """<grad |grad u|, grad u>_g at nodes."""
        def build():
            dw = self.grad_w()
            du = self._grad()[0]
            s = dw[0] * du[0] + dw[1] * du[1] + dw[2] * du[2]
            return s / self.phi() ** 4
        return self._get("wdotu", build)

    def mean_curvature(self):
        """H of the level set through each node w.r.t. grad u / |grad u|.

        Nodes with vanishing gradient (constant regions outside the annulus)
        get H = 0; they are never sampled by interior level surfaces.
        """
        def build():
            w = np.maximum(self.grad_norm(), 1e-150)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                h_arr = self.laplace_beltrami() / w - self.gradw_dot_gradu() / w**2
            return np.where(np.isfinite(h_arr), h_arr, 0.0)
        return self._get("H", build)

    def h_equation_rhs(self):
        """Equation-derived H: the regularized first-order expression."""
        def build():
            f = self.f
            w2 = np.maximum(self.grad_norm(), 1e-150) ** 2
            with np.errstate(divide="ignore", invalid="ignore"):
                fac = ((f.p - 1.0) * w2 + f.eps**2) / (w2 + f.eps**2)
                out = -fac * self.gradw_dot_gradu() / w2
            return np.where(np.isfinite(out), out, 0.0)
        return self._get("Heq", build)

    def interior_mask(self, margin: int = 4):
        """Active nodes at least `margin` cells away from any fixed node."""
        def build():
            act = self.f.active
            ok = act.copy()
            for _ in range(margin):
                nxt = ok.copy()
                nxt[1:, :, :] &= ok[:-1, :, :]
                nxt[:-1, :, :] &= ok[1:, :, :]
                nxt[:, 1:, :] &= ok[:, :-1, :]
                nxt[:, :-1, :] &= ok[:, 1:, :]
                nxt[:, :, 1:] &= ok[:, :, :-1]
                nxt[:, :, :-1] &= ok[:, :, 1:]
                ok = nxt
            return ok
        return self._get(("interior", margin), build)


def field_data(f: GridField) -> FieldData:
    """Cached derived-field accessor (one per GridField)."""
    if not hasattr(f, "_field_data"):
        f._field_data = FieldData(f)
    return f._field_data


def nearest_node(f: GridField, x) -> tuple:
    x = np.asarray(x, dtype=float)
    idx = np.rint((x - f.origin) / f.h).astype(int)
    if np.any(idx < 0) or np.any(idx >= np.asarray(f.shape)):
        raise DomainError(f"point {x} outside the grid")
    return tuple(idx)


def require_regular_interior(f: GridField, idx, margin: int = 4, floor: float = 1e-6):
    fd = field_data(f)
    if not fd.interior_mask(margin)[idx]:
        raise DomainError("sample point too close to a boundary for the stencil")
    w = fd.grad_norm()
    if w[idx] < floor * float(np.max(w[f.active])):
        raise DomainError("sample point in a near-critical region")


def ambient_curvature_nodes(f: GridField):
    """(R, Ric(nu,nu)) node arrays for the radial conformal family.

    Ric is diagonal in the (radial, tangential) frame; the normal direction
    nu = grad u / |grad u| is decomposed accordingly.
    """
    if not f.spec.is_radial:
        raise ParameterError("ambient curvature arrays need a radial metric")
    r = np.maximum(f.radii(), f.spec.r_min)
    R = np.asarray(conformal_scalar_curvature(f.spec, r), dtype=float)
    ric_r = np.asarray(conformal_ric_normal(f.spec, r), dtype=float)
    ric_t = np.asarray(conformal_ric_tangent(f.spec, r), dtype=float)
    fd = field_data(f)
    du = fd._grad()[0]
    w = np.maximum(fd.grad_norm(), 1e-300)
    ph = fd.phi()
    xs = fd._coords()
    # cos of the angle between nu and the radial direction, in the frame
    nur = (du[0] * xs[0] + du[1] * xs[1] + du[2] * xs[2]) / (r * ph**2 * w)
    nur2 = np.clip(nur**2, 0.0, 1.0)
    ric_nn = nur2 * ric_r + (1.0 - nur2) * ric_t
    return R, ric_nn
