"""Regularized p-harmonic solver on a Cartesian annulus.

Solves div_g(w grad u) = 0 with w = (|grad u|_g^2 + eps^2)^((p-2)/2) by
lagged-diffusivity (Picard) iteration: the weight is frozen at the previous
iterate and the resulting linear divergence-form equation is solved with
Jacobi-preconditioned conjugate gradients on a 7-point metric-aware flux
stencil (face coefficients sqrt(det g) g^dd, which for the conformal family
reduce to phi^2 at the face).

The domain is the region between two coordinate spheres r_in < |x| < r_out.
Dirichlet data (0 inside, T or a caller-supplied trace outside) is imposed
where grid edges cross the spheres, with the sub-cell crossing fraction
built into the face coefficient (symmetric Shortley-Weller); this keeps the
matrix SPD while locating the boundary exactly on the sphere along each
edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .errors import (ConvergenceError, DomainError, NumericError,
                     ParameterError)
from .geometry import FOUR_PI, MetricSpec
from .quadrature import sphere_quadrature, trilinear
from .radial import check_exponent

# floor for tiny boundary-crossing fractions; only guards divisions, the
# Jacobi preconditioner absorbs the large diagonal entries it produces
THETA_MIN = 1e-6

FIELD_MAGIC = b"PCAPFLD1"


@dataclass
class GridConfig:
    """Solver configuration for the cubic annulus r_in < |x| < r_out."""

    r_in: float
    r_out: float
    h: float
    T: Optional[float] = None          # None -> radial oracle value at r_out
    outer_mode: str = "constant"       # "constant" | "oracle"
    tol_picard: float = 1e-8
    tol_lin: float = 1e-10
    tol_residual: float = 1e-8
    max_sweeps: int = 200
    max_cg: int = 4000
    coarse_init: bool = True

    def validate(self):
        if not (0 < self.r_in < self.r_out):
            raise ParameterError("need 0 < r_in < r_out")
        if self.h <= 0 or self.h >= (self.r_out - self.r_in) / 4:
            raise ParameterError("spacing h too coarse for the annulus")
        for name in ("tol_picard", "tol_lin", "tol_residual"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")
        if self.outer_mode not in ("constant", "oracle"):
            raise ParameterError("outer_mode must be 'constant' or 'oracle'")


@dataclass
class GridField:
    """Sampled solution of the regularized problem with its grid geometry."""

    spec: MetricSpec
    p: float
    eps: float
    T: float
    origin: np.ndarray
    h: float
    shape: tuple
    u: np.ndarray
    active: np.ndarray
    inner_fixed: np.ndarray
    outer_fixed: np.ndarray
    r_in: float
    r_out: float
    outer_mode: str
    iteration_log: list = dfield(default_factory=list)
    converged: bool = True
    achieved_diff: float = 0.0
    achieved_residual: float = 0.0
    cut_data: list = dfield(default_factory=list, repr=False)
    _radii: np.ndarray = dfield(default=None, repr=False)
    _phi_nodes: np.ndarray = dfield(default=None, repr=False)

    # -- geometry helpers ----------------------------------------------------

    def axes(self):
        nx, ny, nz = self.shape
        return (self.origin[0] + self.h * np.arange(nx),
                self.origin[1] + self.h * np.arange(ny),
                self.origin[2] + self.h * np.arange(nz))

    def radii(self) -> np.ndarray:
        if self._radii is None:
            xs, ys, zs = self.axes()
            self._radii = np.sqrt(xs[:, None, None] ** 2 + ys[None, :, None] ** 2 + zs[None, None, :] ** 2)
        return self._radii

    def phi_nodes(self) -> np.ndarray:
        # radii clamped to the horizon radius: nodes inside the excised ball
        # are Dirichlet-fixed and their metric factor is never used
        if self._phi_nodes is None:
            r = np.maximum(self.radii(), self.spec.r_min)
            self._phi_nodes = np.asarray(self.spec.phi(r), dtype=float)
        return self._phi_nodes

    def points(self, idx):
        return self.origin[None, :] + self.h * np.stack(idx, axis=-1).astype(float)

    # -- persistence -----------------------------------------------------------

    def save(self, path_prefix: str) -> None:
        """Flat binary array with a small header, plus sidecar text metadata.

        Binary layout (little endian): 8-byte magic, 3 x int64 dims, then
        float64 spacing, origin (3), p, eps, T, r_in, r_out, then the node
        values in C order.
        """
        import struct
        with open(path_prefix + ".bin", "wb") as fh:
            fh.write(FIELD_MAGIC)
            fh.write(struct.pack("<3q", *self.shape))
            fh.write(struct.pack("<9d", float(self.h), *(float(v) for v in self.origin),
                                 float(self.p), float(self.eps), float(self.T),
                                 float(self.r_in), float(self.r_out)))
            fh.write(self.u.astype("<f8").tobytes(order="C"))
        with open(path_prefix + ".meta", "w") as fh:
            fh.write(f"dims = {self.shape[0]} {self.shape[1]} {self.shape[2]}\n")
            fh.write(f"spacing = {float(self.h)!r}\n")
            fh.write("origin = " + " ".join(repr(float(v)) for v in self.origin) + "\n")
            fh.write(f"p = {float(self.p)!r}\neps = {float(self.eps)!r}\nT = {float(self.T)!r}\n")
            fh.write(f"r_in = {float(self.r_in)!r}\nr_out = {float(self.r_out)!r}\n")
            fh.write(f"outer_mode = {self.outer_mode}\n")
            fh.write(f"metric = {self.spec.label}\n")

    def radial_averages_csv(self, path, n_bins: int = 40, header_lines=()):
        r = self.radii()[self.active]
        vals = self.u[self.active]
        edges = np.linspace(self.r_in, self.r_out, n_bins + 1)
        idx = np.clip(np.searchsorted(edges, r) - 1, 0, n_bins - 1)
        sums = np.bincount(idx, weights=vals, minlength=n_bins)
        cnts = np.maximum(np.bincount(idx, minlength=n_bins), 1)
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write("r_mid,u_mean,count\n")
            for b in range(n_bins):
                fh.write(f"{0.5 * (edges[b] + edges[b + 1]):.12g},{sums[b] / cnts[b]:.12g},{int(cnts[b])}\n")


def load_field(path_prefix: str, spec: MetricSpec) -> GridField:
    import struct
    with open(path_prefix + ".bin", "rb") as fh:
        magic = fh.read(8)
        if magic != FIELD_MAGIC:
            raise NumericError(f"{path_prefix}.bin is not a field file")
        shape = struct.unpack("<3q", fh.read(24))
        h, ox, oy, oz, p, eps, T, r_in, r_out = struct.unpack("<9d", fh.read(72))
        u = np.frombuffer(fh.read(), dtype="<f8").reshape(shape).copy()
    meta = {}
    with open(path_prefix + ".meta") as fh:
        for line in fh:
            if "=" in line:
                k, v = line.split("=", 1)
                meta[k.strip()] = v.strip()
    f = _blank_field(spec, p, eps, T, np.array([ox, oy, oz]), h, shape,
                     r_in, r_out, meta.get("outer_mode", "constant"))
    f.u = u
    f.cut_data = _build_cuts(f)
    return f


# ---------------------------------------------------------------------------
# grid construction


def _blank_field(spec, p, eps, T, origin, h, shape, r_in, r_out, outer_mode) -> GridField:
    f = GridField(spec=spec, p=p, eps=eps, T=T, origin=np.asarray(origin, dtype=float),
                  h=float(h), shape=tuple(shape), u=None, active=None,
                  inner_fixed=None, outer_fixed=None, r_in=r_in, r_out=r_out,
                  outer_mode=outer_mode)
    r = f.radii()
    f.inner_fixed = r <= r_in
    f.outer_fixed = r >= r_out
    f.active = ~(f.inner_fixed | f.outer_fixed)
    if not f.active.any():
        raise ParameterError("no active nodes between the spheres")
    f.u = np.zeros(shape)
    return f


def make_field(spec: MetricSpec, p: float, eps: float, cfg: GridConfig,
               outer_value: Callable = None) -> GridField:
    """Allocate the grid, classify nodes and precompute cut-edge data."""
    cfg.validate()
    n_half = int(round(cfg.r_out / cfg.h))
    if abs(n_half * cfg.h - cfg.r_out) > 1e-12 * cfg.r_out:
        raise ParameterError("r_out must be an integer multiple of h")
    n = 2 * n_half + 1
    origin = np.array([-cfg.r_out] * 3)
    T = cfg.T
    f = _blank_field(spec, p, eps, T, origin, cfg.h, (n, n, n), cfg.r_in, cfg.r_out, cfg.outer_mode)
    f.u = np.where(f.outer_fixed, T, 0.0)
    f.cut_data = _build_cuts(f, outer_value)
    return f


def _build_cuts(f: GridField, outer_value: Callable = None):
    """Boundary-crossing edges: (axis, sign, index tuple, theta, bc value).

    theta is the fraction of the edge from the active node to the sphere
    crossing; bc the Dirichlet value at the crossing point.
    """
    cuts = []
    act = f.active
    r = f.radii()
    xs = f.axes()
    coords = np.meshgrid(*xs, indexing="ij", sparse=True)
    for axis in range(3):
        for sign in (+1, -1):
            sl_from = [slice(None)] * 3
            sl_to = [slice(None)] * 3
            if sign > 0:
                sl_from[axis] = slice(None, -1)
                sl_to[axis] = slice(1, None)
            else:
                sl_from[axis] = slice(1, None)
                sl_to[axis] = slice(None, -1)
            cut_mask = np.zeros(f.shape, dtype=bool)
            cut_mask[tuple(sl_from)] = act[tuple(sl_from)] & ~act[tuple(sl_to)]
            idx = np.nonzero(cut_mask)
            if len(idx[0]) == 0:
                continue
            # neighbor index and sphere selection
            nb = list(idx)
            nb[axis] = nb[axis] + sign
            inner = f.inner_fixed[tuple(nb)]
            r_target = np.where(inner, f.r_in, f.r_out)
            xp = np.stack([np.broadcast_to(coords[d], f.shape)[idx] for d in range(3)], axis=-1)
            # solve |xp + t*h*sign*e_axis|^2 = r_target^2 for t in (0, 1]
            b = sign * f.h * xp[:, axis]
            a = f.h ** 2
            c = np.einsum("ij,ij->i", xp, xp) - r_target**2
            disc = np.maximum(b**2 - a * c, 0.0)
            sq = np.sqrt(disc)
            t1 = (-b - sq) / a
            t2 = (-b + sq) / a
            theta = np.where((t1 > 1e-12) & (t1 <= 1.0 + 1e-12), t1, t2)
            theta = np.clip(theta, THETA_MIN, 1.0)
            x_cut = xp.copy()
            x_cut[:, axis] += sign * theta * f.h
            bc = np.zeros(len(theta))
            outer_sel = ~inner
            if outer_sel.any():
                if f.outer_mode == "oracle" and outer_value is not None:
                    bc[outer_sel] = outer_value(x_cut[outer_sel])
                else:
                    bc[outer_sel] = f.T
            # face metric factor phi^2 at the midpoint of the cut stretch
            x_mid = xp.copy()
            x_mid[:, axis] += sign * 0.5 * theta * f.h
            ph = np.asarray(f.spec.phi(np.linalg.norm(x_mid, axis=1)), dtype=float) if f.spec.is_radial else np.ones(len(theta))
            cuts.append((axis, sign, idx, theta, bc, ph**2))
    return cuts


# ---------------------------------------------------------------------------
# derived node fields


def node_gradient(f: GridField):
    """Coordinate gradient Du at nodes (centered; cut-aware near boundaries).

    At nodes with a boundary-crossing edge the centered difference is
    replaced by the divided difference between the two available samples
    (the Dirichlet value at the crossing point and the opposite neighbor).
    Returns (du list of 3 arrays, |grad u|_g array).
    """
    h = f.h
    u = f.u
    du = []
    for axis in range(3):
        g = np.zeros_like(u)
        sl_c, sl_p, sl_m = [slice(None)] * 3, [slice(None)] * 3, [slice(None)] * 3
        sl_c[axis] = slice(1, -1)
        sl_p[axis] = slice(2, None)
        sl_m[axis] = slice(None, -2)
        g[tuple(sl_c)] = (u[tuple(sl_p)] - u[tuple(sl_m)]) / (2 * h)
        du.append(g)
    for axis, sign, idx, theta, bc, _ in f.cut_data:
        nb = list(idx)
        nb[axis] = nb[axis] - sign  # opposite neighbor (inside the annulus)
        opp = u[tuple(nb)]
        slope = sign * (bc - opp) / ((theta + 1.0) * h)
        du[axis][idx] = slope
    grad2 = du[0] ** 2 + du[1] ** 2 + du[2] ** 2
    if f.spec.is_radial:
        grad2 = grad2 / f.phi_nodes() ** 4
    return du, np.sqrt(grad2)


def _weights(f: GridField, u: np.ndarray) -> np.ndarray:
    """Lagged diffusivity (|grad u|_g^2 + eps^2)^((p-2)/2) at nodes."""
    sav = f.u
    f.u = u
    _, w = node_gradient(f)
    f.u = sav
    return (w**2 + f.eps**2) ** ((f.p - 2.0) / 2.0)


def _face_phi2(f: GridField):
    """phi^2 at face midpoints for the three axes (ones for flat metrics)."""
    xs, ys, zs = f.axes()
    out = []
    for axis in range(3):
        ax = [xs, ys, zs]
        mids = [a.copy() for a in ax]
        mids[axis] = 0.5 * (ax[axis][:-1] + ax[axis][1:])
        r = np.sqrt(mids[0][:, None, None] ** 2 + mids[1][None, :, None] ** 2 + mids[2][None, None, :] ** 2)
        ph = np.asarray(f.spec.phi(np.maximum(r, f.spec.r_min)), dtype=float) if f.spec.is_radial else np.ones_like(r)
        out.append(ph**2)
    return out


def _assemble(f: GridField, W: np.ndarray, face_phi2):
    """Face coefficients, diagonal and right-hand side for frozen weights."""
    h2 = f.h ** 2
    act = f.active
    cs = []
    diag = np.zeros(f.shape)
    b = np.zeros(f.shape)
    for axis in range(3):
        sl_lo = [slice(None)] * 3
        sl_hi = [slice(None)] * 3
        sl_lo[axis] = slice(None, -1)
        sl_hi[axis] = slice(1, None)
        pair = act[tuple(sl_lo)] & act[tuple(sl_hi)]
        wbar = 0.5 * (W[tuple(sl_lo)] + W[tuple(sl_hi)])
        c = np.where(pair, face_phi2[axis] * wbar / h2, 0.0)
        cs.append(c)
        diag[tuple(sl_lo)] += c
        diag[tuple(sl_hi)] += c
    for axis, sign, idx, theta, bc, phi2 in f.cut_data:
        a = phi2 * W[idx] / (theta * h2)
        np.add.at(diag, idx, a)
        np.add.at(b, idx, a * bc)
    diag = np.where(act, diag, 1.0)
    b = np.where(act, b, 0.0)
    return cs, diag, b


def _pcg(f: GridField, cs, diag, b, x0, tol, max_iter):
    """Jacobi-preconditioned conjugate gradients, warm-started at x0."""
    act = f.active
    x = x0.copy()
    Ax = np.empty_like(x)
    _kernels.stencil_apply(x, diag, cs[0], cs[1], cs[2], Ax)
    r = np.where(act, b - Ax, 0.0)
    z = r / diag
    pvec = z.copy()
    rz = _kernels.dot(r, z)
    bnorm = math.sqrt(max(_kernels.dot(b, b), 1e-300))
    it = 0
    res = math.sqrt(max(_kernels.dot(r, r), 0.0))
    while res > tol * bnorm and it < max_iter:
        _kernels.stencil_apply(pvec, diag, cs[0], cs[1], cs[2], Ax)
        Ap = np.where(act, Ax, 0.0)
        alpha = rz / max(_kernels.dot(pvec, Ap), 1e-300)
        x += alpha * pvec
        r -= alpha * Ap
        z = r / diag
        rz_new = _kernels.dot(r, z)
        pvec = z + (rz_new / max(rz, 1e-300)) * pvec
        rz = rz_new
        res = math.sqrt(max(_kernels.dot(r, r), 0.0))
        it += 1
    x = np.where(act, x, x0)
    return x, it, res / bnorm


def _scaled_residual(f: GridField, u: np.ndarray, face_phi2):
    W = _weights(f, u)
    cs, diag, b = _assemble(f, W, face_phi2)
    Au = np.empty_like(u)
    _kernels.stencil_apply(u, diag, cs[0], cs[1], cs[2], Au)
    res = np.where(f.active, (Au - b) / diag, 0.0)
    return res


def _initial_guess(f: GridField) -> np.ndarray:
    """Flat-space harmonic radial ramp between the boundary values."""
    r = np.clip(f.radii(), f.r_in, f.r_out)
    ramp = (1.0 / f.r_in - 1.0 / r) / (1.0 / f.r_in - 1.0 / f.r_out)
    u = f.T * ramp
    u[f.inner_fixed] = 0.0
    u[f.outer_fixed] = f.T
    return u


def solve_regularized(spec: MetricSpec, p: float, eps: float, cfg: GridConfig,
                      outer_value: Callable = None,
                      initial: Optional[np.ndarray] = None) -> GridField:
    """Fixed point of the lagged-diffusivity iteration on the annulus.

    outer_value(x) supplies Dirichlet data at outer-sphere crossing points
    when cfg.outer_mode == "oracle"; otherwise the constant T is used.  When
    cfg.T is None the radial oracle fixes T = u(r_out), so for radial metrics
    the annulus is exactly the truncated domain {0 <= u <= T} with its own
    boundary values.
    """
    p = check_exponent(p)
    if eps < 0:
        raise ParameterError("eps must be nonnegative")
    if not spec.is_radial:
        raise ParameterError("grid solver supports the radial metric family "
                             "(flat/schwarzschild/conformal); sampled metrics "
                             "would need off-diagonal flux terms beyond the "
                             "7-point stencil")
    if cfg.r_in < spec.r_min * (1 - 1e-12):
        raise DomainError("annulus extends inside the horizon")
    cfg.validate()
    if cfg.T is None or (cfg.outer_mode == "oracle" and outer_value is None):
        from .radial import solve_radial
        pot = solve_radial(spec, p)
        if cfg.T is None:
            cfg = GridConfig(**{**cfg.__dict__, "T": float(pot.u_at(cfg.r_out))})
        if cfg.outer_mode == "oracle" and outer_value is None:
            outer_value = lambda pts: pot.u_at(np.linalg.norm(pts, axis=1))
    if not (0.0 < cfg.T < 1.0):
        raise ParameterError("outer value T must lie in (0, 1)")

    f = make_field(spec, p, eps, cfg, outer_value)

    if initial is not None:
        u = np.array(initial, dtype=float)
        if u.shape != f.shape:
            raise ParameterError("initial guess has wrong shape")
    elif cfg.coarse_init and cfg.h <= (cfg.r_out - cfg.r_in) / 16 and abs(p - 2.0) > 1e-12:
        coarse_cfg = GridConfig(**{**cfg.__dict__, "h": 2 * cfg.h, "coarse_init": False,
                                   "tol_picard": max(cfg.tol_picard, 1e-7),
                                   "tol_residual": max(cfg.tol_residual, 1e-7)})
        try:
            fc = solve_regularized(spec, p, eps, coarse_cfg, outer_value)
            u = _prolong(fc.u, f.shape)
            u[f.inner_fixed] = 0.0
            u[f.outer_fixed] = f.T
        except ConvergenceError:
            u = _initial_guess(f)
    else:
        u = _initial_guess(f)

    face_phi2 = _face_phi2(f)
    log = []
    diff = math.inf
    res_max = math.inf
    for sweep in range(cfg.max_sweeps):
        W = _weights(f, u)
        if not np.all(np.isfinite(W)):
            raise NumericError("diffusivity weights not finite")
        cs, diag, b = _assemble(f, W, face_phi2)
        u_new, its, lin_res = _pcg(f, cs, diag, b, u, cfg.tol_lin, cfg.max_cg)
        diff = float(np.max(np.abs(np.where(f.active, u_new - u, 0.0))))
        u = u_new
        res = _scaled_residual(f, u, face_phi2)
        res_max = float(np.max(np.abs(res)))
        log.append({"sweep": sweep, "picard_diff": diff, "cg_iters": its,
                    "lin_residual": lin_res, "residual_max": res_max})
        if diff < cfg.tol_picard and res_max < cfg.tol_residual:
            break
    else:
        f.iteration_log = log
        raise ConvergenceError(
            f"lagged-diffusivity iteration did not converge in {cfg.max_sweeps} "
            f"sweeps (last diff {diff:.3e}, residual {res_max:.3e})", history=log)

    f.u = u
    f.iteration_log = log
    f.converged = True
    f.achieved_diff = diff
    f.achieved_residual = res_max
    return f


def _prolong(uc: np.ndarray, fine_shape) -> np.ndarray:
    """Trilinear prolongation from a 2h grid onto the aligned h grid."""
    uf = np.zeros(fine_shape)
    uf[::2, ::2, ::2] = uc
    uf[1::2, ::2, ::2] = 0.5 * (uc[:-1] + uc[1:])
    uf[:, 1::2, ::2] = 0.5 * (uf[:, :-2:2, ::2] + uf[:, 2::2, ::2])
    uf[:, :, 1::2] = 0.5 * (uf[:, :, :-2:2] + uf[:, :, 2::2])
    return uf


def residual(f: GridField):
    """Nonlinear residual with self-consistent weights, scaled by the diagonal.

    Returns (max, l2) over active nodes plus the full residual array.
    """
    face_phi2 = _face_phi2(f)
    res = _scaled_residual(f, f.u, face_phi2)
    n_act = int(f.active.sum())
    return (float(np.max(np.abs(res))),
            float(math.sqrt(_kernels.dot(res, res) / max(n_act, 1))),
            res)


# ---------------------------------------------------------------------------
# flux normalisation constant


def flux_through_sphere(f: GridField, rho: float, n_theta=24, n_phi=48) -> float:
    """g-flux of (|grad u|_g^2+eps^2)^((p-2)/2) grad u through |x| = rho."""
    if not (f.r_in < rho < f.r_out):
        raise DomainError("flux sphere must lie inside the annulus")
    du, w = node_gradient(f)
    pts, wq = sphere_quadrature(n_theta, n_phi)
    xq = rho * pts
    dun = np.zeros(len(xq))
    for axis in range(3):
        dun += trilinear(du[axis], f.origin, f.h, xq) * pts[:, axis]
    wg = trilinear(w, f.origin, f.h, xq)
    fac = (wg**2 + f.eps**2) ** ((f.p - 2.0) / 2.0)
    ph = np.asarray(f.spec.phi(rho), dtype=float)
    # <grad u, nu>_g dsigma_g = (phi^-2 x^.Du) (phi^4 rho^2 dOmega)
    return float(np.sum(wq * fac * dun * ph**2 * rho**2))


@dataclass
class FluxConstant:
    c: float
    c_inner: float
    c_interior: float
    rel_spread: float


def c_p_epsilon(f: GridField, interior_level: Optional[float] = None) -> FluxConstant:
    """Flux normalisation constant of the regularized field.

    c^(p-1) = (1/4 pi) * flux through the inner boundary; the same flux is
    re-evaluated on an interior level to confirm the divergence-theorem
    constancy.  The inner evaluation uses the closest reliable coordinate
    sphere (two cells outside the horizon sphere).
    """
    rho_in = f.r_in + 2.0 * f.h
    flux_in = flux_through_sphere(f, rho_in)
    if interior_level is None:
        rho_mid = 0.5 * (f.r_in + f.r_out)
        flux_mid = flux_through_sphere(f, rho_mid)
    else:
        from .levelset import extract_level, surface_integral
        surf = extract_level(f, interior_level)
        flux_mid = surface_integral(
            surf, lambda P, w, H: (w**2 + f.eps**2) ** ((f.p - 2.0) / 2.0) * w)
    if flux_in <= 0 or flux_mid <= 0:
        raise NumericError("nonpositive boundary flux")
    c_in = (flux_in / FOUR_PI) ** (1.0 / (f.p - 1.0))
    c_mid = (flux_mid / FOUR_PI) ** (1.0 / (f.p - 1.0))
    spread = abs(c_in - c_mid) / max(c_in, c_mid)
    return FluxConstant(c=c_in, c_inner=c_in, c_interior=c_mid, rel_spread=spread)


def sample_oracle_field(pot, eps: float, cfg: GridConfig) -> GridField:
    """GridField filled with radial-oracle samples (no solve).

    Useful for consistency and refinement studies: the samples solve the
    unregularized equation exactly, so applying the eps-operator to them
    isolates regularization and discretization effects.
    """
    cfg = GridConfig(**{**cfg.__dict__, "T": float(pot.u_at(cfg.r_out))})
    f = make_field(pot.spec, pot.p, eps, cfg,
                   lambda pts: pot.u_at(np.linalg.norm(pts, axis=1)))
    r = np.clip(f.radii(), pot.spec.r_min, pot.r[-1])
    f.u = pot.u_at(r.ravel()).reshape(f.shape)
    f.u[f.inner_fixed & (f.radii() < pot.spec.r_min)] = 0.0
    f.converged = True
    return f
