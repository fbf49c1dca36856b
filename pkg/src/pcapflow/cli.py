"""Batch command-line front end.

Subcommands read a flat INI config and write deterministic CSV/plot/mesh
artifacts.  Exit codes: 0 when every enabled verdict passes, 2 when a
mathematical verdict fails (monotonicity violation, chain violation,
residual above tolerance), 1 on operational errors (bad config, solver
failure).
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import ConfigError, PcapflowError
from .geometry import FOUR_PI, MetricSpec
from .radial import fit_decay_exponent, solve_radial

EXIT_OK, EXIT_OPERATIONAL, EXIT_VERDICT = 0, 1, 2


# ---------------------------------------------------------------------------
# config handling


def _load_config(path):
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    digest = hashlib.sha256(open(path, "rb").read()).hexdigest()[:12]
    return parser, digest


def _get(cfg, section, key, default=None, cast=str):
    if not cfg.has_section(section) or not cfg.has_option(section, key):
        if default is not None:
            return default
        raise ConfigError(f"missing key [{section}] {key}")
    raw = cfg.get(section, key).strip()
    try:
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


def _get_floats(cfg, section, key, default=None):
    if not cfg.has_section(section) or not cfg.has_option(section, key):
        if default is not None:
            return list(default)
        raise ConfigError(f"missing key [{section}] {key}")
    raw = cfg.get(section, key)
    try:
        return [float(tok) for tok in raw.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"bad list for [{section}] {key}: {raw!r}") from exc


def metric_from_config(cfg) -> MetricSpec:
    kind = _get(cfg, "metric", "kind").lower()
    if kind == "flat":
        return MetricSpec.flat(_get(cfg, "metric", "r0", 1.0, float))
    if kind == "schwarzschild":
        return MetricSpec.schwarzschild(_get(cfg, "metric", "m", 1.0, float))
    if kind == "conformal":
        coeffs = _get_floats(cfg, "metric", "phi_coeffs")
        r_min = _get(cfg, "metric", "r_min", None, float)
        if r_min is None:
            raise ConfigError("conformal metric needs [metric] r_min")
        return MetricSpec.conformal(coeffs, r_min)
    if kind == "grid":
        # sampled wrapper around the conformal family, for grid-path checks
        if cfg.has_option("metric", "phi_coeffs"):
            base = MetricSpec.conformal(_get_floats(cfg, "metric", "phi_coeffs"),
                                        _get(cfg, "metric", "r_min", 1.0, float))
        else:
            base = MetricSpec.schwarzschild(_get(cfg, "metric", "m", 1.0, float))
        box_lo = _get(cfg, "metric", "box_lo", -8.0, float)
        box_hi = _get(cfg, "metric", "box_hi", 8.0, float)
        fd_step = _get(cfg, "metric", "fd_step", 1e-3, float)

        def gamma(x):
            r = max(float(np.linalg.norm(x)), base.r_min)
            return (float(base.phi(r)) ** 4 - 1.0) * np.eye(3)

        return MetricSpec.sampled(gamma, ((box_lo,) * 3, (box_hi,) * 3),
                                  tau=_get(cfg, "metric", "tau", 1.0, float),
                                  fd_step=fd_step, r_min=base.r_min)
    raise ConfigError(f"unknown metric kind {kind!r}")


def _p_list(cfg) -> list:
    if cfg.has_option("solver", "p_list"):
        return _get_floats(cfg, "solver", "p_list")
    return [_get(cfg, "solver", "p", 2.0, float)]


def _header(digest, extra=()):
    lines = [f"pcapflow {__version__}", f"config sha256 {digest}"]
    lines.extend(extra)
    return lines


def _outdir(cfg, args):
    out = args.out or _get(cfg, "output", "directory", "out")
    os.makedirs(out, exist_ok=True)
    return out


def _emit(cfg, what, default=True):
    return _get(cfg, "output", what, default, bool)


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve_radial(cfg, digest, args):
    spec = metric_from_config(cfg)
    out = _outdir(cfg, args)
    n = int(_get(cfg, "solver", "n_radial", 4096, float))
    r_max = _get(cfg, "solver", "r_max", 0.0, float) or None
    worst_gap = 0.0
    for p in _p_list(cfg):
        pot = solve_radial(spec, p, n=n, r_max=r_max)
        fitted, expected = fit_decay_exponent(pot)
        gap = abs(fitted - expected) / expected
        worst_gap = max(worst_gap, gap)
        path = os.path.join(out, f"potential_p{p:g}.csv")
        pot.to_csv(path, header_lines=_header(digest, [
            f"metric = {spec.label}", f"p = {p:g}",
            f"cap_p = {pot.cap_p:.12g}", f"c_p = {pot.c_p:.12g}",
            f"t_p = {pot.t_p:.12g}", f"quad_error = {pot.quad_error:.3g}",
            f"decay_exponent_fit = {fitted:.8g}",
            f"decay_exponent_expected = {expected:.8g}",
        ]))
        print(f"p={p:g}: Cap_p={pot.cap_p:.10g} c_p={pot.c_p:.10g} t_p={pot.t_p:.10g} "
              f"decay fit {fitted:.6g} (expected {expected:.6g}) -> {path}")
    ok = worst_gap <= 0.01
    print(f"decay-exponent verdict: {'PASS' if ok else 'FAIL'} (worst gap {worst_gap * 100:.3g}%)")
    return EXIT_OK if ok else EXIT_VERDICT


def _grid_config(cfg):
    from .epsilon import GridConfig
    return GridConfig(
        r_in=_get(cfg, "solver", "r_in", None, float),
        r_out=_get(cfg, "solver", "r_out", None, float),
        h=_get(cfg, "solver", "h", None, float),
        T=_get(cfg, "solver", "T", 0.0, float) or None,
        outer_mode=_get(cfg, "solver", "outer_mode", "constant"),
        tol_picard=_get(cfg, "solver", "tol_picard", 1e-8, float),
        tol_lin=_get(cfg, "solver", "tol_lin", 1e-10, float),
        tol_residual=_get(cfg, "solver", "tol_residual", 1e-8, float),
        max_sweeps=int(_get(cfg, "solver", "max_sweeps", 200, float)),
    )


def cmd_solve_grid(cfg, digest, args):
    from .epsilon import c_p_epsilon, residual, solve_regularized
    spec = metric_from_config(cfg)
    out = _outdir(cfg, args)
    p = _get(cfg, "solver", "p", 2.0, float)
    eps = _get(cfg, "solver", "eps", 1e-3, float)
    gcfg = _grid_config(cfg)
    field = solve_regularized(spec, p, eps, gcfg)
    prefix = os.path.join(out, f"field_p{p:g}_eps{eps:g}")
    field.save(prefix)
    with open(prefix + ".meta", "a") as fh:
        for line in _header(digest):
            fh.write(f"# {line}\n")
    field.radial_averages_csv(prefix + "_radial.csv", header_lines=_header(digest))
    res_max, res_l2, _ = residual(field)
    fc = c_p_epsilon(field)
    print(f"solved {field.shape} nodes, {len(field.iteration_log)} sweeps; "
          f"residual max {res_max:.3e} l2 {res_l2:.3e}")
    print(f"c_p_eps inner {fc.c_inner:.8g} interior {fc.c_interior:.8g} "
          f"spread {fc.rel_spread * 100:.3g}%")
    verdict_ok = res_max <= gcfg.tol_residual * 10.0
    if spec.is_radial:
        pot = solve_radial(spec, p)
        r = np.clip(field.radii(), spec.r_min, pot.r[-1])
        uex = pot.u_at(r.ravel()).reshape(field.shape)
        max_err = float(np.max(np.abs(np.where(field.active, field.u - uex, 0.0))))
        c_gap = abs(fc.c - pot.c_p) / pot.c_p
        print(f"cross-validation: max|u - oracle| = {max_err:.4e}; "
              f"c gap {c_gap * 100:.3g}%")
        with open(prefix + "_crossval.txt", "w") as fh:
            for line in _header(digest):
                fh.write(f"# {line}\n")
            fh.write(f"max_u_error = {max_err:.12g}\n")
            fh.write(f"c_p_eps = {fc.c:.12g}\nc_p_oracle = {pot.c_p:.12g}\n")
            fh.write(f"c_rel_gap = {c_gap:.12g}\nresidual_max = {res_max:.12g}\n")
    print(f"grid-solve verdict: {'PASS' if verdict_ok else 'FAIL'}")
    return EXIT_OK if verdict_ok else EXIT_VERDICT


def _t_grid(cfg, t_p, t_cap=None):
    t_min = _get(cfg, "scan", "t_min", t_p, float)
    t_max = _get(cfg, "scan", "t_max", 100.0 * t_p, float)
    count = int(_get(cfg, "scan", "count", 40, float))
    spacing = _get(cfg, "scan", "spacing", "log")
    if t_min < t_p:
        print(f"warning: t_min {t_min:g} below t_p {t_p:g}; clamped", file=sys.stderr)
        t_min = t_p
    if t_cap is not None and t_max > t_cap:
        print(f"warning: t_max {t_max:g} beyond the solved range; clamped to {t_cap:g}",
              file=sys.stderr)
        t_max = t_cap
    if spacing == "log":
        ts = np.geomspace(t_min, t_max, count)
    elif spacing == "linear":
        ts = np.linspace(t_min, t_max, count)
    else:
        raise ConfigError(f"unknown scan spacing {spacing!r}")
    ts[0] = t_min
    return ts


def cmd_scan(cfg, digest, args):
    from .functional import monotonicity_scan
    spec = metric_from_config(cfg)
    out = _outdir(cfg, args)
    source_kind = _get(cfg, "scan", "source", "radial")
    exit_code = EXIT_OK

    mass_ref = None
    if spec.kind == "schwarzschild":
        mass_ref = spec.mass

    if source_kind == "grid":
        exit_code = max(exit_code, _scan_grid(cfg, digest, args, spec, out))
        return exit_code

    n = int(_get(cfg, "solver", "n_radial", 4096, float))
    r_max = _get(cfg, "solver", "r_max", 0.0, float) or None
    assert_null = _get(cfg, "scan", "assert_null", 0.0, float)
    tol_mono = _get(cfg, "scan", "tol_mono", 0.0, float) or None
    for p in _p_list(cfg):
        pot = solve_radial(spec, p, n=n, r_max=r_max)
        ts = _t_grid(cfg, pot.t_p)
        rep = monotonicity_scan(pot, ts, tol_mono=tol_mono, mass_reference=mass_ref)
        path = os.path.join(out, f"scan_p{p:g}.csv")
        if _emit(cfg, "emit_csv"):
            rep.to_csv(path, header_lines=_header(digest, [f"metric {spec.label}"]))
        if _emit(cfg, "emit_plot"):
            rep.plot(os.path.join(out, f"scan_p{p:g}.svg"))
        v = rep.verdict
        print(f"p={p:g}: rows={v['n_rows']} min_inc={v['min_increment']:.3e} "
              f"monotone={v['monotone']} F(t_p)={v['F_boundary']:.8g} "
              f"F_tail={v['F_tail']:.8g}")
        if not v["monotone"]:
            exit_code = EXIT_VERDICT
        if assert_null > 0:
            worst = max(max(abs(r.F), abs(r.M), abs(r.Q)) for r in rep.rows)
            ok = worst <= assert_null
            print(f"  null verdict: {'PASS' if ok else 'FAIL'} (worst {worst:.3e})")
            if not ok:
                exit_code = EXIT_VERDICT
    return exit_code


def _scan_grid(cfg, digest, args, spec, out):
    from .epsilon import solve_regularized
    from .functional import (approx_monotonicity_defect, compute_F,
                             monotonicity_scan, threshold_t, _flux_constant)
    p = _get(cfg, "solver", "p", 2.0, float)
    eps = _get(cfg, "solver", "eps", 1e-3, float)
    gcfg = _grid_config(cfg)
    field = solve_regularized(spec, p, eps, gcfg)
    c = _flux_constant(field)
    t_p = threshold_t(p, c)
    k = (3.0 - p) / (p - 1.0)
    t_cap = t_p * (1.0 - field.T) ** (-1.0 / k) * 0.98
    ts = _t_grid(cfg, t_p * 1.02, t_cap)
    rep = monotonicity_scan(field, ts)
    exit_code = EXIT_OK
    if _emit(cfg, "emit_csv"):
        rep.to_csv(os.path.join(out, f"scan_grid_p{p:g}_eps{eps:g}.csv"),
                   header_lines=_header(digest, [f"metric {spec.label}"]))
    if _emit(cfg, "emit_plot"):
        rep.plot(os.path.join(out, f"scan_grid_p{p:g}_eps{eps:g}.svg"))
    if _emit(cfg, "emit_mesh", default=False):
        from .functional import reparam_alpha
        from .levelset import export_mesh, extract_level
        for row in rep.rows:
            surf = extract_level(field, reparam_alpha(p, c, row.t))
            export_mesh(surf, os.path.join(out, f"level_t{row.t:.6g}.mesh.txt"),
                        header_lines=_header(digest))
    print(f"grid scan p={p:g} eps={eps:g}: rows={rep.verdict['n_rows']} "
          f"min_inc={rep.verdict['min_increment']:.3e} monotone={rep.verdict['monotone']}")
    if not rep.verdict["monotone"]:
        exit_code = EXIT_VERDICT

    if _get(cfg, "scan", "compare_oracle", False, bool) and spec.is_radial:
        pot = solve_radial(spec, p)
        f_tol = _get(cfg, "scan", "f_tol", 0.05, float)
        worst = 0.0
        lines = []
        for row_g in rep.rows:
            t = row_g.t
            row_o = compute_F(pot, t)
            rel = abs(row_g.F - row_o.F) / max(abs(row_o.F), FOUR_PI * t)
            worst = max(worst, rel)
            lines.append(f"{t:.12g},{row_g.F:.12g},{row_o.F:.12g},{rel:.6g}")
        r = np.clip(field.radii(), spec.r_min, pot.r[-1])
        uex = pot.u_at(r.ravel()).reshape(field.shape)
        max_u_err = float(np.max(np.abs(np.where(field.active, field.u - uex, 0.0))))
        c_gap = abs(c - pot.c_p) / pot.c_p
        ok = worst <= f_tol
        with open(os.path.join(out, f"scan_grid_p{p:g}_eps{eps:g}_crossval.csv"), "w") as fh:
            for line in _header(digest):
                fh.write(f"# {line}\n")
            fh.write(f"# max_u_error = {max_u_err:.12g}\n")
            fh.write(f"# c_p_eps = {c:.12g}\n# c_p_oracle = {pot.c_p:.12g}\n")
            fh.write(f"# c_rel_gap = {c_gap:.12g}\n")
            fh.write("t,F_grid,F_oracle,rel_gap\n")
            fh.write("\n".join(lines) + "\n")
        print(f"  u cross-validation: max|u - oracle| = {max_u_err:.4e}; "
              f"c gap {c_gap * 100:.3g}%")
        print(f"  F cross-validation: worst rel gap {worst * 100:.3g}% "
              f"-> {'PASS' if ok else 'FAIL'}")
        if not ok:
            exit_code = EXIT_VERDICT

    pairs_raw = _get(cfg, "scan", "defect_pairs", "", str)
    if pairs_raw:
        rows = []
        all_hold = True
        for tok in pairs_raw.split(","):
            s_str, t_str = tok.split(":")
            d = approx_monotonicity_defect(field, float(s_str), float(t_str))
            rows.append(d)
            all_hold = all_hold and d["holds"] and d["kernel_max"] <= 1.0 / 6.0 + 1e-12
            print(f"  defect [{float(s_str):g}, {float(t_str):g}]: lhs={d['lhs']:.4e} "
                  f"rhs={d['rhs']:.4e} holds={d['holds']} kernel_max={d['kernel_max']:.4f}")
        with open(os.path.join(out, f"defect_p{p:g}_eps{eps:g}.csv"), "w") as fh:
            for line in _header(digest):
                fh.write(f"# {line}\n")
            fh.write("s,t,lhs,rhs,holds,kernel_max\n")
            for tok, d in zip(pairs_raw.split(","), rows):
                s_str, t_str = tok.split(":")
                fh.write(f"{float(s_str):.12g},{float(t_str):.12g},{d['lhs']:.12g},"
                         f"{d['rhs']:.12g},{int(d['holds'])},{d['kernel_max']:.12g}\n")
        print(f"  defect verdict: {'PASS' if all_hold else 'FAIL'}")
        if not all_hold:
            exit_code = EXIT_VERDICT
    return exit_code


def cmd_penrose(cfg, digest, args):
    from .mass import DEFAULT_C_SOB, penrose_chain
    spec = metric_from_config(cfg)
    out = _outdir(cfg, args)
    p_list = _get_floats(cfg, "penrose", "p_list",
                         [1.05, 1.1, 1.15, 1.2, 1.3, 1.5, 1.7, 2.0, 2.2, 2.5])
    radii = _get_floats(cfg, "penrose", "adm_radii", [50.0, 100.0, 200.0])
    c_sob = _get(cfg, "penrose", "c_sob", DEFAULT_C_SOB, float)
    rep = penrose_chain(spec, p_list, adm_radii=radii, c_sob=c_sob)
    if _emit(cfg, "emit_csv"):
        rep.to_csv(os.path.join(out, "penrose.csv"), header_lines=_header(digest))
    summary = rep.summary()
    with open(os.path.join(out, "penrose_summary.txt"), "w") as fh:
        for line in _header(digest):
            fh.write(f"# {line}\n")
        fh.write(summary + "\n")
    print(summary)
    return EXIT_OK if rep.verdict["holds"] else EXIT_VERDICT


def cmd_adm(cfg, digest, args):
    from .mass import adm_mass
    spec = metric_from_config(cfg)
    out = _outdir(cfg, args)
    radii = _get_floats(cfg, "adm", "radii", [50.0, 100.0, 200.0])
    extrap = _get(cfg, "adm", "extrapolate", True, bool)
    est = adm_mass(spec, radii, extrapolate=extrap)
    with open(os.path.join(out, "adm.csv"), "w") as fh:
        for line in _header(digest, [f"metric {spec.label}"]):
            fh.write(f"# {line}\n")
        fh.write("r,m_estimate\n")
        for r, v in zip(est.radii, est.values):
            fh.write(f"{r:.12g},{v:.12g}\n")
        if est.extrapolated is not None:
            fh.write(f"# extrapolated = {est.extrapolated:.12g}\n")
            fh.write(f"# spread = {est.spread:.12g}\n")
    print("ADM estimates [" + ", ".join(f"{v:.8g}" for v in est.values) + "]; "
          f"extrapolated {est.extrapolated if est.extrapolated is None else format(est.extrapolated, '.10g')} "
          f"+- {est.spread:.2g}")
    return EXIT_OK


def cmd_identities(cfg, digest, args):
    from .epsilon import GridConfig, sample_oracle_field
    from .functional import (div_y_split, divX_residual, h_identity_residual,
                             kato_residual)
    spec = metric_from_config(cfg)
    out = _outdir(cfg, args)
    exit_code = EXIT_OK
    rng = np.random.default_rng(args.seed)
    tol_point = _get(cfg, "identities", "tol_point", 1e-6, float)

    # radial closed-form path
    p = _get(cfg, "identities", "p", 2.0, float)
    n_points = int(_get(cfg, "identities", "n_points", 100, float))
    pot = solve_radial(spec, p)
    r_lo = _get(cfg, "identities", "r_lo", 1.05 * spec.r_min, float)
    r_hi = _get(cfg, "identities", "r_hi", 50.0 * max(1.0, spec.r_min), float)
    radii = np.exp(rng.uniform(math.log(r_lo), math.log(r_hi), n_points))
    rows = []
    worst_dx = worst_kato = 0.0
    n_neg_p = 0
    for r in radii:
        dx = divX_residual(pot, r)
        kt = kato_residual(pot, r)
        pd = div_y_split(pot, r)
        worst_dx = max(worst_dx, dx["residual"])
        worst_kato = max(worst_kato, kt["residual"])
        if pd["P"] < 0:
            n_neg_p += 1
        rows.append((r, dx["residual"], kt["residual"], pd["P"], pd["D"]))
    with open(os.path.join(out, "identities_points.csv"), "w") as fh:
        for line in _header(digest, [f"metric {spec.label}", f"p {p:g}",
                                     f"seed {args.seed}"]):
            fh.write(f"# {line}\n")
        fh.write("r,divx_residual,kato_residual,P,D\n")
        for row in rows:
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")
    ok_points = worst_dx <= tol_point and worst_kato <= tol_point and n_neg_p == 0
    print(f"radial identities at {n_points} points: divX worst {worst_dx:.3e}, "
          f"kato worst {worst_kato:.3e}, P<0 count {n_neg_p} -> "
          f"{'PASS' if ok_points else 'FAIL'}")
    if not ok_points:
        exit_code = EXIT_VERDICT

    # grid refinement path
    if _get(cfg, "identities", "grid_study", True, bool) and spec.is_radial:
        gp = _get(cfg, "identities", "grid_p", 2.5, float)
        hs = _get_floats(cfg, "identities", "grid_h", [0.125, 0.0625])
        r_in = _get(cfg, "identities", "grid_r_in", max(1.0, spec.r_min), float)
        r_out = _get(cfg, "identities", "grid_r_out", r_in + 2.0, float)
        pot_g = solve_radial(spec, gp)
        n_grid_pts = int(_get(cfg, "identities", "grid_points", 24, float))
        pts = _annulus_points(rng, r_in, r_out, n_grid_pts)
        res = {}
        for h in hs:
            f = sample_oracle_field(pot_g, 0.0, GridConfig(r_in=r_in, r_out=r_out, h=h))
            dx = np.array([divX_residual(f, x)["residual"] for x in pts])
            kt = np.array([kato_residual(f, x)["residual"] for x in pts])
            hres = np.array([h_identity_residual(f, x)["residual"] for x in pts])
            pneg = sum(1 for x in pts if div_y_split(f, x)["P"] < 0)
            res[h] = (dx, kt, hres, pneg)
        h0, h1 = sorted(hs, reverse=True)[:2]
        order_dx = float(np.log2(np.median(res[h0][0] / res[h1][0])))
        order_kt = float(np.log2(np.median(res[h0][1] / res[h1][1])))
        min_dx = _get(cfg, "identities", "min_order_divx", 1.8, float)
        min_kt = _get(cfg, "identities", "min_order_kato", 1.0, float)
        ok_grid = (order_dx >= min_dx and order_kt >= min_kt
                   and res[h0][3] == 0 and res[h1][3] == 0)
        with open(os.path.join(out, "identities_refinement.csv"), "w") as fh:
            for line in _header(digest, [f"grid p {gp:g}"]):
                fh.write(f"# {line}\n")
            fh.write("h,divx_median,kato_median,h_identity_median,P_negative\n")
            for h in sorted(hs, reverse=True):
                dx, kt, hres, pneg = res[h]
                fh.write(f"{h:.12g},{np.median(dx):.12g},{np.median(kt):.12g},"
                         f"{np.median(hres):.12g},{pneg}\n")
            fh.write(f"# order_divx = {order_dx:.6g}\n# order_kato = {order_kt:.6g}\n")
        print(f"grid refinement: divX order {order_dx:.3g} (need >= {min_dx:g}), "
              f"kato order {order_kt:.3g} (need >= {min_kt:g}) -> "
              f"{'PASS' if ok_grid else 'FAIL'}")
        if not ok_grid:
            exit_code = EXIT_VERDICT
    return exit_code


def _annulus_points(rng, r_in, r_out, n):
    # mid-annulus band, clear of the finite-difference stencil margin at
    # the coarsest refinement level
    pts = []
    span = r_out - r_in
    lo, hi = r_in + 0.4 * span, r_out - 0.35 * span
    while len(pts) < n:
        x = rng.uniform(-hi, hi, 3)
        if lo < np.linalg.norm(x) < hi:
            pts.append(x)
    return pts


# ---------------------------------------------------------------------------


_COMMANDS = {
    "solve-radial": cmd_solve_radial,
    "solve-grid": cmd_solve_grid,
    "scan": cmd_scan,
    "penrose": cmd_penrose,
    "identities": cmd_identities,
    "adm": cmd_adm,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pcapflow",
        description="Level-set analysis of p-capacitary potentials")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="INI config file")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--seed", type=int, default=12345,
                        help="seed for randomized sample points")
    parser.add_argument("--threads", type=int, default=0,
                        help="numba thread count (0 = library default)")
    args = parser.parse_args(argv)

    if args.threads > 0:
        try:
            import numba
            numba.set_num_threads(args.threads)
        except ImportError:
            pass

    try:
        cfg, digest = _load_config(args.config)
        return _COMMANDS[args.command](cfg, digest, args)
    except PcapflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL


if __name__ == "__main__":
    sys.exit(main())
