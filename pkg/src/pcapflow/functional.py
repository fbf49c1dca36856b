"""The monotone level-set functional and everything attached to it.

For a potential with flux constant c and exponent p, levels are
reparametrised by

    alpha(t) = 1 - (t_p / t)^((3-p)/(p-1)),
    t_p      = ((p-1)/(3-p) * c)^((p-1)/(3-p)),

and the functional evaluated on {u = alpha(t)} is

    F(t) = 4 pi t - t^(2/(p-1))/c   * int |grad u| H dsigma
                  + t^((5-p)/(p-1))/c^2 * int |grad u|^2 dsigma,

with the Hawking-type split F = M + Q,

    M(t) = t/4 (16 pi - int H^2),
    Q(t) = t/4 int (2(p-1)/(3-p) |grad u|/(1-u) - H)^2.

The split is an algebraic identity because the t-power coefficients equal
(a t/2)/(1-alpha) and (a^2 t/4)/(1-alpha)^2 with a = 2(p-1)/(3-p); both are
computed from the same (t_p/t) power so rows satisfy F = M + Q to rounding.

The pointwise residual operations check the divergence identity of the
monotonicity vector field, the Kato-type identity, and the sign split
div Y = P + D against independent routes: closed-form radial expressions
for radial potentials, finite differences for grid fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, NumericError, ParameterError
from .geometry import (FOUR_PI, conformal_area, conformal_mean_curvature,
                       conformal_ric_normal, conformal_scalar_curvature)
from .levelset import extract_level, surface_integral
from .radial import RadialPotential

SPLIT_TOL = 1e-10  # relative tolerance of the F = M + Q identity per row


# ---------------------------------------------------------------------------
# reparametrisation


def threshold_t(p: float, c_p: float) -> float:
    """Lower end t_p of the reparametrised time."""
    k = (3.0 - p) / (p - 1.0)
    return math.exp((math.log((p - 1.0) / (3.0 - p)) + math.log(c_p)) / k)


def reparam_alpha(p: float, c_p: float, t: float) -> float:
    """Level value alpha(t); requires t >= t_p."""
    t_p = threshold_t(p, c_p)
    if t < t_p * (1.0 - 1e-12):
        raise DomainError(f"t={t:g} below the threshold t_p={t_p:g}")
    k = (3.0 - p) / (p - 1.0)
    return max(0.0, 1.0 - (t_p / t) ** k)


def reparam_t(p: float, c_p: float, alpha: float) -> float:
    """Inverse map: the time whose level value is alpha."""
    if not (0.0 <= alpha < 1.0):
        raise DomainError("alpha must lie in [0, 1)")
    t_p = threshold_t(p, c_p)
    return t_p * (1.0 - alpha) ** (-(p - 1.0) / (3.0 - p))


# ---------------------------------------------------------------------------
# F, M, Q rows


@dataclass
class FRow:
    t: float
    alpha: float
    area: float
    flux: float
    willmore: float
    F: float
    M: float
    Q: float
    regular: bool

    def as_csv(self) -> str:
        return (f"{self.t:.12g},{self.alpha:.12g},{self.area:.12g},{self.flux:.12g},"
                f"{self.willmore:.12g},{self.F:.12g},{self.M:.12g},{self.Q:.12g},"
                f"{int(self.regular)}")


def _signed_exp(log_coeff: float, value: float) -> float:
    """sign(value) * exp(log_coeff + log |value|), robust for extreme powers."""
    if value == 0.0:
        return 0.0
    return math.copysign(math.exp(log_coeff + math.log(abs(value))), value)


def _assemble_row(p, c, t, area, flux, i_wh, i_w2, willmore, i_q, regular) -> FRow:
    ln_t, ln_c = math.log(t), math.log(c)
    term2 = _signed_exp(2.0 / (p - 1.0) * ln_t - ln_c, i_wh)
    term3 = _signed_exp((5.0 - p) / (p - 1.0) * ln_t - 2.0 * ln_c, i_w2)
    F = FOUR_PI * t - term2 + term3
    M = 0.25 * t * (16.0 * math.pi - willmore)
    Q = 0.25 * t * i_q
    scale = max(abs(F), abs(M) + abs(Q), FOUR_PI * t)
    if abs(F - (M + Q)) > SPLIT_TOL * scale:
        raise NumericError(
            f"Hawking split violated: F={F!r}, M+Q={M + Q!r} at t={t:g}")
    return FRow(t=t, alpha=reparam_alpha(p, c, t), area=area, flux=flux,
                willmore=willmore, F=F, M=M, Q=Q, regular=regular)


def _radial_row(pot: RadialPotential, t: float) -> FRow:
    p, c = pot.p, pot.c_p
    k = (3.0 - p) / (p - 1.0)
    t_p = pot.t_p
    one_minus = (t_p / t) ** k          # exact 1 - alpha(t)
    alpha = 1.0 - one_minus
    r = pot.spec.r_min if alpha <= 0.0 else pot.invert(alpha)
    w = float(pot.grad_norm(r))
    H = float(conformal_mean_curvature(pot.spec, r))
    area = float(conformal_area(pot.spec, r))
    flux = math.exp((p - 1.0) * math.log(w)) * area
    a = 2.0 * (p - 1.0) / (3.0 - p)
    q_int = area * (a * w / one_minus - H) ** 2
    return _assemble_row(p, c, t, area, flux, w * H * area, w**2 * area,
                         H**2 * area, q_int, regular=w > 0.0)


def _grid_row(f, t: float) -> FRow:
    from .epsilon import c_p_epsilon
    p = f.p
    c = _flux_constant(f)
    t_p = threshold_t(p, c)
    k = (3.0 - p) / (p - 1.0)
    t_max = t_p * (1.0 - f.T) ** (-1.0 / k)
    if not (t_p * (1.0 - 1e-12) <= t < t_max):
        raise DomainError(f"t={t:g} outside the solved range [{t_p:g}, {t_max:g})")
    one_minus = (t_p / t) ** k
    alpha = 1.0 - one_minus
    if alpha <= 1e-12:
        # boundary level: marching cubes cannot triangulate the data floor,
        # use the inner-boundary sphere with one-sided extrapolated fields
        from .levelset import inner_boundary_surface
        surf = inner_boundary_surface(f)
    else:
        surf = extract_level(f, alpha)
    eps = f.eps
    area = surf.area
    flux = surface_integral(surf, lambda P, w, H: (w**2 + eps**2) ** ((p - 2.0) / 2.0) * w)
    i_wh = surface_integral(surf, lambda P, w, H: w * H)
    i_w2 = surface_integral(surf, lambda P, w, H: w**2)
    willmore = surface_integral(surf, lambda P, w, H: H**2)
    a = 2.0 * (p - 1.0) / (3.0 - p)
    i_q = surface_integral(surf, lambda P, w, H: (a * w / one_minus - H) ** 2)
    return _assemble_row(p, c, t, area, flux, i_wh, i_w2, willmore, i_q,
                         regular=surf.regular)


def _flux_constant(f) -> float:
    if not hasattr(f, "_c_flux"):
        from .epsilon import c_p_epsilon
        f._c_flux = c_p_epsilon(f).c
    return f._c_flux


def compute_F(source, t: float) -> FRow:
    """F, M, Q and the surface integrals on the level {u = alpha(t)}.

    Radial potentials use closed-form sphere data with the exact flux
    constant; grid fields use the regularized constant c_{p,eps} and the
    eps-form of the flux integrand.
    """
    from .epsilon import GridField
    if isinstance(source, RadialPotential):
        return _radial_row(source, float(t))
    if isinstance(source, GridField):
        return _grid_row(source, float(t))
    raise TypeError(f"cannot evaluate the functional on {type(source)!r}")


def compute_F_epsilon(field, t: float) -> FRow:
    """Regularized functional on a grid field (alias of compute_F there)."""
    from .epsilon import GridField
    if not isinstance(field, GridField):
        raise TypeError("compute_F_epsilon needs a grid field")
    return _grid_row(field, float(t))


# ---------------------------------------------------------------------------
# monotonicity scans


@dataclass
class MonotonicityReport:
    p: float
    eps: float
    c: float
    t_p: float
    rows: list
    verdict: dict
    source_label: str = ""
    mass_reference: Optional[float] = None

    def to_csv(self, path, header_lines=()) -> None:
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write(f"# p = {self.p:.12g}, eps = {self.eps:.12g}, c = {self.c:.12g}, "
                     f"t_p = {self.t_p:.12g}\n")
            for key, val in sorted(self.verdict.items()):
                fh.write(f"# verdict.{key} = {val}\n")
            fh.write("t,alpha,area,flux,willmore,F,M,Q,regular\n")
            for row in self.rows:
                fh.write(row.as_csv() + "\n")

    def plot(self, path) -> None:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        ts = [r.t for r in self.rows]
        fig, ax = plt.subplots(figsize=(7, 4.5))
        ax.plot(ts, [r.F for r in self.rows], "-o", ms=3, label="F")
        ax.plot(ts, [r.M for r in self.rows], "-s", ms=3, label="M")
        ax.plot(ts, [r.Q for r in self.rows], "-^", ms=3, label="Q")
        if self.mass_reference is not None:
            ax.axhline(8 * math.pi * self.mass_reference, color="k", ls="--",
                       lw=1, label="8 pi m_ADM")
        ax.set_xscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel("functional value")
        ax.legend()
        ax.set_title(f"p = {self.p:g} ({self.source_label})")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)


def monotonicity_scan(source, t_grid: Sequence[float],
                      tol_mono: Optional[float] = None,
                      mass_reference: Optional[float] = None) -> MonotonicityReport:
    """Evaluate F on an increasing t-grid and report the monotonicity verdict.

    Irregular levels are kept in the table but excluded from the verdict.
    tol_mono defaults to 1e-8 (radial oracle) or 1e-3 (grid) relative to the
    largest |F| in the scan.
    """
    from .epsilon import GridField
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(np.diff(t_grid) <= 0):
        raise ParameterError("t_grid must be strictly increasing")
    is_radial = isinstance(source, RadialPotential)
    if tol_mono is None:
        tol_mono = 1e-8 if is_radial else 1e-3
    rows = [compute_F(source, t) for t in t_grid]
    p = source.p
    c = source.c_p if is_radial else _flux_constant(source)
    t_p = threshold_t(p, c)
    eps = 0.0 if is_radial else source.eps

    reg = [r for r in rows if r.regular]
    f_vals = np.array([r.F for r in reg])
    scale = float(np.max(np.abs(f_vals))) if len(f_vals) else 0.0
    # 4 pi t_p is the natural size of F even when the scan is identically zero
    scale = max(scale, FOUR_PI * t_p)
    incs = np.diff(f_vals)
    min_inc = float(np.min(incs)) if len(incs) else 0.0
    boundary = _radial_row(source, t_p).F if is_radial else None
    verdict = {
        "min_increment": min_inc,
        "tol_mono": tol_mono,
        "scale": scale,
        "monotone": bool(min_inc >= -tol_mono * scale),
        "n_rows": len(rows),
        "n_regular": len(reg),
        "F_boundary": boundary,
        "F_tail": rows[-1].F if rows else None,
    }
    label = source.spec.label if hasattr(source, "spec") else ""
    return MonotonicityReport(p=p, eps=eps, c=c, t_p=t_p, rows=rows,
                              verdict=verdict, source_label=label,
                              mass_reference=mass_reference)


# ---------------------------------------------------------------------------
# approximate monotonicity defect (regularized fields)


def approx_monotonicity_defect(field, s: float, t: float) -> dict:
    """Both sides of the regularized almost-monotonicity bound on [s, t].

    lhs = F(t) - F(s); rhs is the negative eps-weighted volume integral
    between the two levels (midpoint rule over grid cells).  Also reports
    the pointwise kernel bound eps|grad u| / (2(p+1)|grad u|^2 + 3 eps^2),
    which never exceeds 1/6.
    """
    from .epsilon import GridField
    from .fields import field_data
    if not isinstance(field, GridField):
        raise TypeError("defect bound needs a grid field")
    if field.eps <= 0:
        raise ParameterError("defect bound applies to regularized fields (eps > 0)")
    if not (s <= t):
        raise ParameterError("need s <= t")
    p, eps = field.p, field.eps
    c = _flux_constant(field)
    row_s = _grid_row(field, s)
    row_t = _grid_row(field, t)
    lhs = row_t.F - row_s.F

    fd = field_data(field)
    w = fd.grad_norm()
    u = field.u
    sel = field.active & (u > row_s.alpha) & (u < row_t.alpha)
    kern = eps * w / (2.0 * (p + 1.0) * w**2 + 3.0 * eps**2)
    kern_max = float(np.max(kern[field.active])) if field.active.any() else 0.0
    k = (3.0 - p) / (p - 1.0)
    B = k * (1.0 - u)
    pref = c ** ((p - 1.0) / (3.0 - p))
    dmu = fd.phi() ** 6 * field.h ** 3
    integ = kern[sel] * pref * w[sel] ** 2 / B[sel] ** ((p - 1.0) / (3.0 - p) + 3.0)
    volume_integral = float(np.sum(integ * dmu[sel] if np.ndim(dmu) else integ * dmu))
    rhs = -eps * ((p + 1.0) / (p - 1.0)) ** 2 * volume_integral
    return {"lhs": lhs, "rhs": rhs, "holds": bool(lhs >= rhs),
            "kernel_max": kern_max, "kernel_bound": 1.0 / 6.0,
            "n_cells": int(sel.sum()), "F_s": row_s.F, "F_t": row_t.F,
            "regular": row_s.regular and row_t.regular}


# ---------------------------------------------------------------------------
# pointwise identities, radial closed forms


def _radial_identity_data(pot: RadialPotential, r: float) -> dict:
    spec, p, c = pot.spec, pot.p, pot.c_p
    ph = float(spec.phi(r))
    dph = float(spec.dphi(r))
    d2ph = float(spec.d2phi(r))
    A = r**2 * ph**4
    Ap = 2 * r * ph**4 + 4 * r**2 * ph**3 * dph
    App = (2 * ph**4 + 16 * r * ph**3 * dph
           + 12 * r**2 * ph**2 * dph**2 + 4 * r**2 * ph**3 * d2ph)
    w = float(pot.grad_norm(r))
    wp = -w * Ap / ((p - 1.0) * A)
    erw = wp / ph**2
    H = Ap / (A * ph**2)
    Hp = -2 * dph * Ap / (ph**3 * A) + (App / A - (Ap / A) ** 2) / ph**2
    u = float(pot.u_at(r))
    one_minus = float(pot.one_minus_at(r))
    k = (3.0 - p) / (p - 1.0)
    B = k * one_minus
    Phi = math.exp((p - 1.0) / (3.0 - p) * (math.log(c) - math.log(B)))
    R = float(conformal_scalar_curvature(spec, r))
    ric_nn = float(conformal_ric_normal(spec, r))
    return dict(p=p, c=c, ph=ph, A=A, Ap=Ap, App=App, w=w, wp=wp, erw=erw,
                H=H, Hp=Hp, u=u, one_minus=one_minus, k=k, B=B, Phi=Phi,
                R=R, ric_nn=ric_nn)


def _point_radius(pot: RadialPotential, x) -> float:
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x)) if x.ndim else float(x)
    if r < pot.spec.r_min * (1 - 1e-12) or r > pot.r[-1]:
        raise DomainError("identity sample outside the solved radial range")
    return r


def _divx_radial(pot: RadialPotential, r: float) -> dict:
    d = _radial_identity_data(pot, r)
    p, c = d["p"], d["c"]
    A, Ap = d["A"], d["Ap"]
    w, wp, H, Hp = d["w"], d["wp"], d["H"], d["Hp"]
    B, Phi, ph = d["B"], d["Phi"], d["ph"]
    k = d["k"]
    term_cap = math.exp((p - 1.0) * (math.log(w) - math.log(c)))
    G = term_cap - w * H / B + w**2 / B**2
    Gp = (-(Ap / A) * term_cap  # d/dr of w^(p-1)/c^(p-1) = 1/A
          - (wp * H + w * Hp) / B - k * ph**2 * w**2 * H / B**2
          + 2 * w * wp / B**2 + 2 * k * ph**2 * w**3 / B**3)
    Xnu = Phi * G
    Xnup = Phi * (ph**2 * w / B) * G + Phi * Gp
    direct = Xnup / ph**2 + H * Xnu
    r_sigma = 2.0 / A
    quad = (5.0 - p) / (p - 1.0) * (w / B - H / 2.0) ** 2
    bracket = term_cap - r_sigma / 2.0 + d["R"] / 2.0 + quad
    geometric = Phi * (w / B) * bracket
    scale = Phi * (w / B) * (term_cap + r_sigma / 2.0 + abs(d["R"]) / 2.0
                             + (5.0 - p) / (p - 1.0) * (w / B + abs(H) / 2.0) ** 2)
    scale = max(scale, abs(direct), abs(geometric), 1e-300)
    return {"direct": direct, "geometric": geometric,
            "residual": abs(direct - geometric) / scale, "scale": scale}


def _kato_radial(pot: RadialPotential, r: float) -> dict:
    d = _radial_identity_data(pot, r)
    p = d["p"]
    hess2 = d["erw"] ** 2 + (d["w"] * d["H"]) ** 2 / 2.0
    gradw2 = d["erw"] ** 2
    lhs = hess2 - (1.0 + (p - 1.0) ** 2 / 2.0) * gradw2
    rhs = 0.0  # trace-free second fundamental form and tangential gradient vanish
    return {"lhs": lhs, "rhs": rhs,
            "residual": abs(lhs - rhs) / max(hess2, 1e-300)}


def _div_y_radial(pot: RadialPotential, r: float) -> dict:
    d = _radial_identity_data(pot, r)
    p, k = d["p"], d["k"]
    pref = d["Phi"] * d["w"] / d["B"]
    P = pref * (p - 1.0) * (3.0 - p) / 2.0 * d["erw"] ** 2 / d["w"] ** 2
    D = pref * (d["ric_nn"] + (p - 1.0) * (5.0 - p) / (3.0 - p) ** 2
                * (d["w"] ** 2 / d["one_minus"] ** 2
                   + (3.0 - p) * d["erw"] / d["one_minus"]))
    return {"P": P, "D": D}


# ---------------------------------------------------------------------------
# pointwise identities, grid finite-difference path


def _grid_identity_cache(f):
    from .fields import ambient_curvature_nodes, field_data
    if hasattr(f, "_identity_cache"):
        return f._identity_cache
    if f.eps != 0.0:
        raise ParameterError("grid identity residuals are defined for "
                             "unregularized fields (eps = 0); sample the "
                             "oracle with eps = 0")
    fd = field_data(f)
    p = f.p
    c = _flux_constant(f)
    du = fd.du()
    w = np.maximum(fd.grad_norm(), 1e-300)
    dW = fd.grad_w()
    lap = fd.laplace_beltrami()
    ph = fd.phi()
    k = (3.0 - p) / (p - 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        B = k * (1.0 - f.u)
        Phi = c ** ((p - 1.0) / (3.0 - p)) * B ** (-(p - 1.0) / (3.0 - p))
        wfac = w ** (p - 2.0)
        inv_phi4 = ph**-4.0
        X = []
        for a in range(3):
            grad_u_a = inv_phi4 * du[a]
            grad_w_a = inv_phi4 * dW[a]
            X.append(Phi * (wfac * grad_u_a / c ** (p - 1.0)
                            + (grad_w_a - (lap / w) * grad_u_a) / B
                            + w * grad_u_a / B**2))
        divX = np.zeros(f.shape)
        ph6 = ph**6
        from .fields import _centered
        for a in range(3):
            divX += _centered(ph6 * X[a], a, f.h)
        divX /= ph6
        # frame quantities for the geometric side
        hess = fd.hessian_frame()
        nu = np.stack([du[a] / (ph**2 * w) for a in range(3)], axis=-1)
        dWf = np.stack([dW[a] / ph**2 for a in range(3)], axis=-1)
        gradw2 = np.sum(dWf**2, axis=-1)
        wdotu = fd.gradw_dot_gradu()
        normal_part = wdotu / w
        tangw2 = np.maximum(gradw2 - normal_part**2, 0.0)
        hess_nu = np.einsum("...ab,...b->...a", hess, nu)
        nu_hess_nu = np.einsum("...a,...a->...", hess_nu, nu)
        # |P Hess P|^2 = |Hess|^2 - 2|Hess nu|^2 + (nu Hess nu)^2
        hess2 = np.einsum("...ab,...ab->...", hess, hess)
        proj2 = hess2 - 2.0 * np.einsum("...a,...a->...", hess_nu, hess_nu) + nu_hess_nu**2
        H_hess = (np.einsum("...aa->...", hess) - nu_hess_nu) / w
        habs2 = np.maximum(proj2, 0.0) / w**2
        ring2 = np.maximum(habs2 - H_hess**2 / 2.0, 0.0)
        Ramb, ric_nn = ambient_curvature_nodes(f)
        r_sigma = Ramb - 2.0 * ric_nn + H_hess**2 - habs2
        term_cap = w ** (p - 1.0) / c ** (p - 1.0)
        quad = (5.0 - p) / (p - 1.0) * (w / B - H_hess / 2.0) ** 2
        bracket = term_cap - r_sigma / 2.0 + tangw2 / w**2 + Ramb / 2.0 + ring2 / 2.0 + quad
        geometric = Phi * (w / B) * bracket
        scale = Phi * (w / B) * (term_cap + np.abs(r_sigma) / 2.0 + tangw2 / w**2
                                 + np.abs(Ramb) / 2.0 + ring2 / 2.0
                                 + (5.0 - p) / (p - 1.0) * (w / B + np.abs(H_hess) / 2.0) ** 2)
    f._identity_cache = {
        "divX": divX, "geometric": geometric, "scale": scale, "w": w,
        "hess2": hess2, "gradw2": gradw2, "tangw2": tangw2, "ring2": ring2,
        "wdotu": wdotu, "H_hess": H_hess, "B": B, "Phi": Phi,
        "ric_nn": ric_nn, "one_minus": 1.0 - f.u, "c": c,
    }
    return f._identity_cache


def divX_residual(source, x) -> dict:
    """|div X (assembled) - div X (curvature bracket)|, locally normalised.

    Radial sources evaluate both sides from closed-form radial expressions;
    grid fields assemble X from finite differences and difference its
    divergence, comparing against the bracket built from the frame Hessian
    and the ambient curvature (intrinsic curvature via the traced Gauss
    equation).
    """
    from .epsilon import GridField
    if isinstance(source, RadialPotential):
        return _divx_radial(source, _point_radius(source, x))
    if isinstance(source, GridField):
        from .fields import nearest_node, require_regular_interior
        idx = nearest_node(source, x)
        require_regular_interior(source, idx)
        cache = _grid_identity_cache(source)
        a = float(cache["divX"][idx])
        b = float(cache["geometric"][idx])
        scale = max(float(cache["scale"][idx]), abs(a), abs(b), 1e-300)
        return {"direct": a, "geometric": b, "residual": abs(a - b) / scale,
                "scale": scale}
    raise TypeError(f"cannot evaluate identities on {type(source)!r}")


def kato_residual(source, x) -> dict:
    """Residual of the Kato-type identity for p-harmonic functions."""
    from .epsilon import GridField
    if isinstance(source, RadialPotential):
        return _kato_radial(source, _point_radius(source, x))
    if isinstance(source, GridField):
        from .fields import nearest_node, require_regular_interior
        idx = nearest_node(source, x)
        require_regular_interior(source, idx)
        cache = _grid_identity_cache(source)
        p = source.p
        hess2 = float(cache["hess2"][idx])
        gradw2 = float(cache["gradw2"][idx])
        lhs = hess2 - (1.0 + (p - 1.0) ** 2 / 2.0) * gradw2
        w2 = float(cache["w"][idx]) ** 2
        rhs = (w2 * float(cache["ring2"][idx])
               + (1.0 - (p - 1.0) ** 2 / 2.0) * float(cache["tangw2"][idx]))
        return {"lhs": lhs, "rhs": rhs,
                "residual": abs(lhs - rhs) / max(hess2, 1e-300)}
    raise TypeError(f"cannot evaluate identities on {type(source)!r}")


def div_y_split(source, x) -> dict:
    """Sign-split div Y = P + D; P is nonnegative by construction.

    Grid fields with eps > 0 use the regularized split (P_eps, D_eps); the
    exact split is used for radial potentials and eps = 0 samples.
    """
    from .epsilon import GridField
    if isinstance(source, RadialPotential):
        return _div_y_radial(source, _point_radius(source, x))
    if not isinstance(source, GridField):
        raise TypeError(f"cannot evaluate identities on {type(source)!r}")
    from .fields import field_data, nearest_node, require_regular_interior
    f = source
    idx = nearest_node(f, x)
    require_regular_interior(f, idx)
    fd = field_data(f)
    p, eps = f.p, f.eps
    c = _flux_constant(f)
    w = float(fd.grad_norm()[idx])
    wdotu = float(fd.gradw_dot_gradu()[idx])
    dW = fd.grad_w()
    ph = float(fd.phi()[idx]) if f.spec.is_radial else 1.0
    dWf2 = sum(float(dW[a][idx]) ** 2 for a in range(3)) / ph**4
    normal2 = (wdotu / w) ** 2
    tangw2 = max(dWf2 - normal2, 0.0)
    cache = _grid_identity_cache(f) if eps == 0.0 else None
    if cache is not None:
        ring2 = float(cache["ring2"][idx])
        ric_nn = float(cache["ric_nn"][idx])
    else:
        from .fields import ambient_curvature_nodes
        _, ric_arr = ambient_curvature_nodes(f)
        ric_nn = float(ric_arr[idx])
        ring2 = _ring2_at(f, idx)
    one_minus = 1.0 - float(f.u[idx])
    k = (3.0 - p) / (p - 1.0)
    B = k * one_minus
    Phi = c ** ((p - 1.0) / (3.0 - p)) * B ** (-(p - 1.0) / (3.0 - p))
    pref = Phi * w / B
    w2, e2 = w**2, eps**2
    weps4 = (w2 + e2) ** 2
    P = pref * (tangw2 / w2 + ring2
                + (p - 1.0) * (3.0 - p) / 2.0 * wdotu**2 / weps4
                + e2 * (2.0 * w2 + e2) / (2.0 * w2**2) * wdotu**2 / weps4)
    D = pref * (ric_nn + (p - 1.0) * (5.0 - p) / (3.0 - p) ** 2 * w2 / one_minus**2
                + ((5.0 - p) * (p - 1.0) * w2 + (p + 1.0) * e2)
                / ((3.0 - p) * (w2 + e2)) * wdotu / (one_minus * w))
    return {"P": float(P), "D": float(D)}


def _ring2_at(f, idx) -> float:
    from .fields import field_data
    fd = field_data(f)
    hess = fd.hessian_frame()[idx]
    du = [fd.du()[a][idx] for a in range(3)]
    ph = float(fd.phi()[idx]) if f.spec.is_radial else 1.0
    w = float(fd.grad_norm()[idx])
    nu = np.array(du) / (ph**2 * w)
    hess_nu = hess @ nu
    nhn = float(nu @ hess_nu)
    hess2 = float(np.sum(hess**2))
    proj2 = hess2 - 2.0 * float(hess_nu @ hess_nu) + nhn**2
    H_hess = (float(np.trace(hess)) - nhn) / w
    habs2 = max(proj2, 0.0) / w**2
    return max(habs2 - H_hess**2 / 2.0, 0.0)


def h_identity_residual(field, x) -> dict:
    """Mean curvature from geometry vs from the regularized equation."""
    from .fields import field_data, nearest_node, require_regular_interior
    idx = nearest_node(field, x)
    require_regular_interior(field, idx)
    fd = field_data(field)
    a = float(fd.mean_curvature()[idx])
    b = float(fd.h_equation_rhs()[idx])
    return {"geometric": a, "equation": b,
            "residual": abs(a - b) / max(abs(a), abs(b), 1e-300)}
