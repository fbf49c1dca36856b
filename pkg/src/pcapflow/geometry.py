"""Asymptotically flat 3-metrics with horizon boundary.

Two concrete representations are supported:

* radial conformally flat metrics g = phi(r)^4 * delta outside a coordinate
  sphere r = r_min (flat space and Schwarzschild in isotropic coordinates are
  special cases), and
* metrics sampled on a coordinate box as g_ij = delta_ij + gamma_ij with
  callable components.

All curvature formulas follow the convention that round spheres in flat
space have positive mean curvature with respect to the outward normal and
ambient flat space has scalar curvature zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, NumericError, ParameterError

FOUR_PI = 4.0 * math.pi


def _as_array(x):
    x = np.asarray(x, dtype=float)
    if x.shape != (3,):
        raise DomainError(f"expected a coordinate 3-vector, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class MetricSpec:
    """Description of a complete asymptotically flat 3-metric with horizon.

    kind is one of "flat", "schwarzschild", "conformal", "grid".  The three
    radial kinds share the conformal representation g = phi^4 delta with the
    horizon at the coordinate sphere |x| = r_min; "grid" carries callable
    perturbation components gamma_ij on a box.

    phi_series holds the leading coefficients (c1, c2) of the large-r
    expansion phi = 1 + c1/r + c2/r^2 + ...; they control the analytic tail
    used when normalising radial potentials.
    """

    kind: str
    r_min: float
    phi: Callable = None
    dphi: Callable = None
    d2phi: Callable = None
    mass: Optional[float] = None
    phi_series: tuple = (0.0, 0.0)
    tau: float = 1.0
    hoelder_alpha: float = 0.5
    gamma: Callable = None
    dgamma: Callable = None
    box: Optional[tuple] = None
    fd_step: float = 1e-3
    label: str = ""

    # -- constructors -------------------------------------------------------

    @staticmethod
    def flat(r0: float = 1.0) -> "MetricSpec":
        if r0 <= 0:
            raise ParameterError("inner radius must be positive")
        one = lambda r: np.ones_like(np.asarray(r, dtype=float))
        zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        return MetricSpec(kind="flat", r_min=float(r0), phi=one, dphi=zero,
                          d2phi=zero, phi_series=(0.0, 0.0), tau=1.0,
                          label=f"flat(r0={r0:g})")

    @staticmethod
    def schwarzschild(m: float = 1.0) -> "MetricSpec":
        """Schwarzschild metric in isotropic coordinates, horizon at r = m/2."""
        if m <= 0:
            raise ParameterError("mass must be positive")
        m = float(m)
        return MetricSpec(
            kind="schwarzschild", r_min=0.5 * m,
            phi=lambda r: 1.0 + 0.5 * m / np.asarray(r, dtype=float),
            dphi=lambda r: -0.5 * m / np.asarray(r, dtype=float) ** 2,
            d2phi=lambda r: m / np.asarray(r, dtype=float) ** 3,
            mass=m, phi_series=(0.5 * m, 0.0), tau=1.0,
            label=f"schwarzschild(m={m:g})")

    @staticmethod
    def conformal(coeffs: Sequence[float], r_min: float) -> "MetricSpec":
        """Conformal factor phi = 1 + coeffs[0]/r + coeffs[1]/r^2 + ..."""
        if r_min <= 0:
            raise ParameterError("r_min must be positive")
        cs = [float(c) for c in coeffs]

        def phi(r):
            r = np.asarray(r, dtype=float)
            out = np.ones_like(r)
            for k, c in enumerate(cs):
                out = out + c * r ** (-(k + 1))
            return out

        def dphi(r):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            for k, c in enumerate(cs):
                out = out - (k + 1) * c * r ** (-(k + 2))
            return out

        def d2phi(r):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            for k, c in enumerate(cs):
                out = out + (k + 1) * (k + 2) * c * r ** (-(k + 3))
            return out

        series = (cs[0] if cs else 0.0, cs[1] if len(cs) > 1 else 0.0)
        spec = MetricSpec(kind="conformal", r_min=float(r_min), phi=phi,
                          dphi=dphi, d2phi=d2phi, phi_series=series, tau=1.0,
                          label=f"conformal({cs}, r_min={r_min:g})")
        spec.validate_radial()
        return spec

    @staticmethod
    def sampled(gamma: Callable, box, tau: float, hoelder_alpha: float = 0.5,
                fd_step: float = 1e-3, r_min: float = 1.0,
                dgamma: Callable = None) -> "MetricSpec":
        """Grid variant: gamma(x) -> (3,3) array, metric g = delta + gamma.

        The horizon is the user-declared inner isosurface |x| = r_min.
        dgamma(x) -> (3,3,3) with dgamma[k,i,j] = d_k gamma_ij may be given;
        otherwise spatial derivatives fall back to centered differences of
        gamma with step fd_step.
        """
        lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
        if np.any(hi <= lo):
            raise ParameterError("box upper corner must exceed lower corner")
        return MetricSpec(kind="grid", r_min=float(r_min), gamma=gamma,
                          dgamma=dgamma, box=(tuple(lo), tuple(hi)),
                          tau=float(tau), hoelder_alpha=float(hoelder_alpha),
                          fd_step=float(fd_step), label="sampled-grid")

    # -- basic queries -------------------------------------------------------

    @property
    def is_radial(self) -> bool:
        return self.kind in ("flat", "schwarzschild", "conformal")

    def validate_radial(self, r_max: float = 1e6, n: int = 200) -> None:
        """Check phi > 0 on [r_min, r_max] and phi -> 1 at large r."""
        rs = np.geomspace(self.r_min, r_max, n)
        ph = np.asarray(self.phi(rs), dtype=float)
        if np.any(ph <= 0):
            raise ParameterError("conformal factor must be positive on the domain")
        if abs(ph[-1] - 1.0) > 0.05:
            raise ParameterError("conformal factor does not approach 1 at infinity")

    def check_point(self, x) -> np.ndarray:
        x = _as_array(x)
        if self.is_radial:
            if np.linalg.norm(x) < self.r_min * (1.0 - 1e-12):
                raise DomainError(f"|x|={np.linalg.norm(x):g} inside the excised ball r_min={self.r_min:g}")
        else:
            lo, hi = self.box
            if np.any(x < np.asarray(lo)) or np.any(x > np.asarray(hi)):
                raise DomainError(f"point {x} outside the declared box")
        return x

    def series_coefficients(self, r_ref: float = 1e4):
        """(c1, c2) of phi - 1 ~ c1/r + c2/r^2; measured when not stored.

        Specs built from the provided constructors carry exact coefficients;
        for hand-built radial specs with a bare callable the coefficients
        are extracted from samples at r_ref (error O(c3 / r_ref) each).
        """
        if not self.is_radial:
            raise ParameterError("series coefficients only defined for radial kinds")
        c1, c2 = self.phi_series
        if (c1, c2) != (0.0, 0.0) or self.kind == "flat":
            return c1, c2
        t1 = float(self.phi(r_ref)) - 1.0
        t2 = float(self.phi(0.5 * r_ref)) - 1.0
        if abs(t1) < 1e-14 and abs(t2) < 1e-14:
            return 0.0, 0.0
        # t1 = c1 x + c2 x^2, t2 = 2 c1 x + 4 c2 x^2 with x = 1/r_ref
        c2 = (t2 - 2.0 * t1) * r_ref**2 / 2.0
        c1 = t1 * r_ref - c2 / r_ref
        return c1, c2


@dataclass
class PointGeometry:
    """Pointwise metric data: components, inverse, volume density, curvature."""

    x: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_det: float
    scalar_curvature: float
    ricci: Callable = field(repr=False, default=None)  # ricci(v) = Ric(v, v), v in coordinates

    def check(self, tol: float = 1e-10) -> None:
        eye = self.g_inv @ self.g
        if not np.allclose(eye, np.eye(3), atol=tol):
            raise NumericError("metric inverse inconsistent")
        if self.sqrt_det <= 0:
            raise NumericError("volume density must be positive")


# ---------------------------------------------------------------------------
# Radial conformal helpers (shared with the radial oracle and the grid solver)


def conformal_area(spec: MetricSpec, r):
    """g-area of the coordinate sphere of radius r: 4 pi r^2 phi^4."""
    r = np.asarray(r, dtype=float)
    return FOUR_PI * r**2 * np.asarray(spec.phi(r), dtype=float) ** 4


def conformal_mean_curvature(spec: MetricSpec, r):
    """Mean curvature of the coordinate sphere w.r.t. the outward unit normal."""
    r = np.asarray(r, dtype=float)
    ph = np.asarray(spec.phi(r), dtype=float)
    dph = np.asarray(spec.dphi(r), dtype=float)
    return (2.0 / r + 4.0 * dph / ph) / ph**2


def conformal_scalar_curvature(spec: MetricSpec, r):
    """R = -8 phi^-5 (phi'' + 2 phi'/r) for g = phi^4 delta."""
    r = np.asarray(r, dtype=float)
    ph = np.asarray(spec.phi(r), dtype=float)
    lap = np.asarray(spec.d2phi(r), dtype=float) + 2.0 * np.asarray(spec.dphi(r), dtype=float) / r
    return -8.0 * lap / ph**5


def conformal_ric_normal(spec: MetricSpec, r):
    """Ric(nu, nu) for the unit radial direction nu = phi^-2 d_r."""
    r = np.asarray(r, dtype=float)
    ph = np.asarray(spec.phi(r), dtype=float)
    dph = np.asarray(spec.dphi(r), dtype=float)
    d2ph = np.asarray(spec.d2phi(r), dtype=float)
    return -4.0 * (d2ph - dph**2 / ph + dph / r) / ph**5


def conformal_ric_tangent(spec: MetricSpec, r):
    """Ric(e, e) for unit tangent directions; R = Ric_nn + 2 Ric_tt."""
    return 0.5 * (conformal_scalar_curvature(spec, r) - conformal_ric_normal(spec, r))


# ---------------------------------------------------------------------------
# Sampled-grid metric machinery (centered second-order differences)


def _gamma_at(spec: MetricSpec, x):
    gam = np.asarray(spec.gamma(x), dtype=float)
    if gam.shape != (3, 3):
        raise NumericError("gamma callable must return a 3x3 array")
    return 0.5 * (gam + gam.T)


def _metric_grid(spec: MetricSpec, x):
    g = np.eye(3) + _gamma_at(spec, x)
    w = np.linalg.eigvalsh(g)
    if w[0] <= 0:
        raise DomainError(f"sampled metric not positive definite at {x} (min eigenvalue {w[0]:g})")
    return g

def _dg_grid(spec: MetricSpec, x, h):
    """dg[k,i,j] = d_k g_ij by centered differences (or exact if provided)."""
    if spec.dgamma is not None:
        return np.asarray(spec.dgamma(x), dtype=float)
    dg = np.empty((3, 3, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        dg[k] = (_gamma_at(spec, x + e) - _gamma_at(spec, x - e)) / (2 * h)
    return dg


def _christoffel_grid(spec: MetricSpec, x, h):
    g = _metric_grid(spec, x)
    ginv = np.linalg.inv(g)
    dg = _dg_grid(spec, x, h)
    # Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    Gam = np.empty((3, 3, 3))
    for k in range(3):
        for i in range(3):
            for j in range(3):
                s = 0.0
                for l in range(3):
                    s += ginv[k, l] * (dg[i, j, l] + dg[j, i, l] - dg[l, i, j])
                Gam[k, i, j] = 0.5 * s
    return Gam


def _ricci_grid(spec: MetricSpec, x, h):
    """Ricci tensor by centered differences of the Christoffel symbols."""
    Gam0 = _christoffel_grid(spec, x, h)
    dGam = np.empty((3, 3, 3, 3))  # dGam[m,k,i,j] = d_m Gamma^k_ij
    for m in range(3):
        e = np.zeros(3)
        e[m] = h
        dGam[m] = (_christoffel_grid(spec, x + e, h) - _christoffel_grid(spec, x - e, h)) / (2 * h)
    Ric = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            s = 0.0
            for k in range(3):
                s += dGam[k, k, i, j] - dGam[i, k, k, j]
                for l in range(3):
                    s += Gam0[k, k, l] * Gam0[l, i, j] - Gam0[k, j, l] * Gam0[l, i, k]
            Ric[i, j] = s
    return Ric


# ---------------------------------------------------------------------------
# Operations


def metric_at(spec: MetricSpec, x) -> PointGeometry:
    """Pointwise metric components, volume density and curvature."""
    x = spec.check_point(x)
    if spec.is_radial:
        r = float(np.linalg.norm(x))
        ph = float(spec.phi(r))
        g = ph**4 * np.eye(3)
        g_inv = ph**-4 * np.eye(3)
        sqrt_det = ph**6
        R = float(conformal_scalar_curvature(spec, r))
        ric_nn = float(conformal_ric_normal(spec, r))
        ric_tt = float(conformal_ric_tangent(spec, r))
        nu = x / r  # euclidean radial direction

        def ricci(v):
            v = np.asarray(v, dtype=float)
            vr = float(np.dot(v, nu))
            vt2 = float(np.dot(v, v)) - vr**2
            # components in the g-orthonormal frame scale by phi^4
            return ph**4 * (ric_nn * vr**2 + ric_tt * vt2)

        return PointGeometry(x=x, g=g, g_inv=g_inv, sqrt_det=sqrt_det,
                             scalar_curvature=R, ricci=ricci)

    h = spec.fd_step
    g = _metric_grid(spec, x)
    g_inv = np.linalg.inv(g)
    sqrt_det = math.sqrt(float(np.linalg.det(g)))
    Ric = _ricci_grid(spec, x, h)
    R = float(np.einsum("ij,ij->", g_inv, Ric))

    def ricci(v):
        v = np.asarray(v, dtype=float)
        return float(v @ Ric @ v)

    return PointGeometry(x=x, g=g, g_inv=g_inv, sqrt_det=sqrt_det,
                         scalar_curvature=R, ricci=ricci)


def scalar_curvature(spec: MetricSpec, x) -> float:
    """Scalar curvature at a point (1/length^2)."""
    x = spec.check_point(x)
    if spec.is_radial:
        return float(conformal_scalar_curvature(spec, float(np.linalg.norm(x))))
    return metric_at(spec, x).scalar_curvature


@dataclass
class DecayReport:
    """Measured asymptotic-decay diagnostics on a family of spheres."""

    radii: np.ndarray
    tau: float
    gamma_measure: np.ndarray   # sup over sphere of |x|^tau |gamma_ij|
    dgamma_measure: np.ndarray  # sup over sphere of |x|^(1+tau) |d_k gamma_ij|
    failing: bool

    def rows(self):
        return list(zip(self.radii, self.gamma_measure, self.dgamma_measure))


def _sphere_points(r, n_theta=12, n_phi=24):
    th = np.arccos(np.linspace(-1 + 1e-3, 1 - 1e-3, n_theta))
    phi = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    T, P = np.meshgrid(th, phi, indexing="ij")
    pts = np.stack([r * np.sin(T) * np.cos(P), r * np.sin(T) * np.sin(P), r * np.cos(T)], axis=-1)
    return pts.reshape(-1, 3)


def check_asymptotic_flatness(spec: MetricSpec, radii) -> DecayReport:
    """Measure sup |x|^tau |gamma| and |x|^(1+tau) |d gamma| on spheres.

    Flags failure when both decay measures grow across every consecutive
    pair of radii (bounded oscillation is tolerated).  The Hoelder seminorm
    appearing in the full decay hypothesis is not measured; estimating it
    from samples is ill-posed at desk scale.
    """
    radii = np.asarray(sorted(radii), dtype=float)
    if radii.ndim != 1 or len(radii) < 1:
        raise ParameterError("need at least one radius")
    gm, dgm = [], []
    for r in radii:
        if spec.is_radial:
            spec.check_point(np.array([r, 0.0, 0.0]))
            ph = float(spec.phi(r))
            dph = float(spec.dphi(r))
            # gamma = (phi^4 - 1) delta; |d_k gamma_ij| maximal component 4 phi^3 phi'
            gm.append(r**spec.tau * abs(ph**4 - 1.0))
            dgm.append(r ** (1.0 + spec.tau) * abs(4.0 * ph**3 * dph))
        else:
            pts = _sphere_points(r)
            worst_g, worst_dg = 0.0, 0.0
            for x in pts:
                spec.check_point(x)
                gam = _gamma_at(spec, x)
                dg = _dg_grid(spec, x, spec.fd_step)
                worst_g = max(worst_g, float(np.max(np.abs(gam))))
                worst_dg = max(worst_dg, float(np.max(np.abs(dg))))
            gm.append(r**spec.tau * worst_g)
            dgm.append(r ** (1.0 + spec.tau) * worst_dg)
    gm = np.asarray(gm)
    dgm = np.asarray(dgm)

    def grows(seq):
        if len(seq) < 2 or np.max(seq) < 1e-14:
            return False
        increasing = bool(np.all(np.diff(seq) > 0))
        return increasing and seq[-1] > seq[0] * 1.05

    return DecayReport(radii=radii, tau=spec.tau, gamma_measure=gm,
                       dgamma_measure=dgm, failing=grows(gm) or grows(dgm))


def horizon_area(spec: MetricSpec, grid_field=None) -> float:
    """g-area of the horizon boundary.

    Radial variants use the closed form 4 pi r_min^2 phi(r_min)^4.  For grid
    variants pass the solved/sampled field whose zero level describes the
    horizon; the area is then obtained by level-surface quadrature.
    """
    if spec.is_radial:
        return float(conformal_area(spec, spec.r_min))
    if grid_field is None:
        raise ParameterError("grid metric specs need a field for horizon quadrature")
    from .levelset import inner_boundary_surface
    return inner_boundary_surface(grid_field).area
