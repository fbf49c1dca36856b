import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.interpolate import CubicSpline

from pcapflow import MetricSpec, radial_capacity, radial_geometry_at, solve_radial
from pcapflow.errors import DomainError, ParameterError
from pcapflow.radial import fit_decay_exponent

FOUR_PI = 4 * math.pi


def test_flat_p2_closed_form(flat_pot2):
    # u = 1 - 1/r
    assert flat_pot2.cap_p == pytest.approx(FOUR_PI, rel=1e-10)
    assert flat_pot2.c_p == pytest.approx(1.0, rel=1e-10)
    assert flat_pot2.t_p == pytest.approx(1.0, rel=1e-10)
    for r in (1.0, 2.0, 5.0, 700.0):
        assert flat_pot2.u_at(r) == pytest.approx(1 - 1 / r, abs=1e-12)
    assert flat_pot2.invert(0.5) == pytest.approx(2.0, abs=1e-10)


def test_flat_p15_closed_form(flat_spec):
    pot = solve_radial(flat_spec, 1.5)
    assert pot.cap_p == pytest.approx(FOUR_PI * math.sqrt(3.0), rel=1e-10)
    for r in (1.5, 3.0, 20.0):
        assert pot.u_at(r) == pytest.approx(1 - r**-3.0, abs=1e-12)


def test_schwarzschild_p2_potential_is_harmonic_symbolically():
    # the closed form used to validate the oracle really solves the equation
    import sympy as sp
    import oracles
    R = oracles.R_
    phi = oracles.schwarzschild_phi(1)
    u = (1 - 1 / (2 * R)) / (1 + 1 / (2 * R))
    sg = phi**6 * R**2
    lap = sp.diff(sg * sp.diff(u, R) / phi**4, R) / sg
    for r in (0.6, 1.5, 7.0):
        assert abs(oracles.numeric(lap, r)) < 1e-25
    flux = (sp.diff(u, R) / phi**2) * (R**2 * phi**4)
    for r in (0.6, 3.0):
        assert oracles.numeric(flux, r) == pytest.approx(1.0, abs=1e-25)


def test_schwarzschild_p2_closed_form(schw_pot2):
    u_exact = lambda r: (1 - 0.5 / r) / (1 + 0.5 / r)
    assert schw_pot2.cap_p == pytest.approx(FOUR_PI, rel=1e-10)
    assert schw_pot2.c_p == pytest.approx(1.0, rel=1e-10)
    assert schw_pot2.t_p == pytest.approx(1.0, rel=1e-10)
    for r in (0.5, 1.0, 3.0, 250.0):
        assert schw_pot2.u_at(r) == pytest.approx(u_exact(r), abs=1e-11)


def test_geometry_record_flat(flat_pot2):
    rec = radial_geometry_at(flat_pot2, 2.0)
    assert rec["grad_norm_g"] == pytest.approx(0.25, rel=1e-10)
    assert rec["H_g"] == pytest.approx(1.0, rel=1e-12)
    assert rec["area_g"] == pytest.approx(16 * math.pi, rel=1e-12)


def test_geometry_record_schwarzschild_horizon(schw_pot2):
    rec = radial_geometry_at(schw_pot2, 0.5)
    assert abs(rec["H_g"]) < 1e-14
    assert rec["grad_norm_g"] == pytest.approx(0.25, rel=1e-8)
    assert rec["area_g"] == pytest.approx(16 * math.pi, rel=1e-12)
    assert rec["u"] == pytest.approx(0.0, abs=1e-12)


def test_flux_constancy(schw_pot25):
    for r in (0.5, 0.9, 3.3, 40.0, 900.0):
        flux = schw_pot25.flux_at(r)
        assert flux == pytest.approx(schw_pot25.cap_p, rel=1e-8)


def test_derived_constant_relations(schw_pot25):
    # c_p = (Cap_p / 4 pi)^(1/(p-1)) and t_p = ((p-1)/(3-p) c_p)^((p-1)/(3-p))
    pot = schw_pot25
    p = pot.p
    assert pot.c_p == pytest.approx((pot.cap_p / FOUR_PI) ** (1 / (p - 1)), rel=1e-12)
    k = (p - 1) / (3 - p)
    assert pot.t_p == pytest.approx((k * pot.c_p) ** k, rel=1e-12)


def test_potential_monotone(schw_pot25):
    assert np.all(np.diff(schw_pot25.u) > 0)
    assert schw_pot25.u[0] == 0.0
    assert schw_pot25.u[-1] < 1.0
    assert np.all(schw_pot25.du_dr > 0)


def test_capacity_continuous_in_p(schw_spec):
    # halving the exponent step halves the capacity jump (local Lipschitz)
    for p0 in (1.4, 2.0, 2.6):
        c0 = radial_capacity(schw_spec, p0)
        j1 = abs(radial_capacity(schw_spec, p0 + 0.02) - c0)
        j2 = abs(radial_capacity(schw_spec, p0 + 0.01) - c0)
        assert j2 < 0.7 * j1
        assert j1 < 0.2 * c0


def test_decay_exponent_fit(schw_pot2, schw_pot25):
    for pot in (schw_pot2, schw_pot25):
        fitted, expected = fit_decay_exponent(pot)
        assert fitted == pytest.approx(expected, rel=0.01)


def test_one_minus_at_no_cancellation(schw_pot2):
    r = 5000.0
    direct = 1.0 - schw_pot2.u_at(r)
    stable = schw_pot2.one_minus_at(r)
    assert stable == pytest.approx(1.0 / (r + 0.5), rel=1e-6)
    assert direct == pytest.approx(stable, rel=1e-4)


def test_ode_residual_order(schw_pot25):
    # interpolate u on subsampled grids and check the flux first integral
    pot = schw_pot25

    def flux_residual(stride):
        r = pot.r[::stride]
        u = pot.u[::stride]
        spl = CubicSpline(r, u)
        rr = np.geomspace(r[2], r[-3] / 100, 200)
        ph = np.asarray(pot.spec.phi(rr))
        w = spl(rr, 1) / ph**2
        flux = w ** (pot.p - 1) * rr**2 * ph**4
        return float(np.max(np.abs(flux / (pot.cap_p / FOUR_PI) - 1.0)))

    res4, res2 = flux_residual(4), flux_residual(2)
    order = math.log2(res4 / res2)
    assert order >= 1.5


def test_parameter_errors(flat_spec):
    for bad in (0.5, 1.0, 3.0, 3.5):
        with pytest.raises(ParameterError):
            solve_radial(flat_spec, bad)
    for bad in (1.001, 2.95):  # inside (1,3) but outside the supported window
        with pytest.raises(ParameterError):
            solve_radial(flat_spec, bad)


def test_domain_errors(flat_pot2):
    with pytest.raises(DomainError):
        flat_pot2.u_at(0.5)
    with pytest.raises(DomainError):
        flat_pot2.invert(1.5)
    with pytest.raises(DomainError):
        radial_geometry_at(flat_pot2, 0.2)


def test_csv_export(tmp_path, flat_pot2):
    path = tmp_path / "pot.csv"
    flat_pot2.to_csv(path, header_lines=["test"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# test"
    assert lines[1] == "r,u,du_dr,grad_norm_g,H_g,area_g"
    assert len(lines) == 2 + len(flat_pot2.r)


@settings(max_examples=12, deadline=None)
@given(p=st.floats(1.2, 2.8))
def test_flux_law_random_exponent(p):
    # the flux through any sphere equals the capacity, for every exponent
    pot = solve_radial(MetricSpec.schwarzschild(1.0), p, n=1024)
    for r in (0.6, 2.0, 50.0):
        assert pot.flux_at(r) == pytest.approx(pot.cap_p, rel=1e-7)


@settings(max_examples=10, deadline=None)
@given(c1=st.floats(0.0, 1.0), c2=st.floats(-0.05, 0.2), p=st.floats(1.3, 2.7))
def test_random_conformal_metric_pipeline(c1, c2, p):
    # generative check over the conformal family: positive potential slope,
    # flux constancy, and the asymptotic decay law
    spec = MetricSpec.conformal([c1, c2], r_min=0.7)
    pot = solve_radial(spec, p, n=1024)
    # strictly increasing wherever 1 - u is resolvable in double precision
    # (for small p the tail of 1 - u underflows and u saturates at 1.0)
    resolvable = pot.u[:-1] < 1.0 - 1e-13
    assert np.all(np.diff(pot.u)[resolvable] > 0)
    assert np.all(np.diff(pot.u) >= 0)
    for r in (0.8, 3.0, 100.0):
        assert pot.flux_at(r) == pytest.approx(pot.cap_p, rel=1e-7)
    if 1.0 - pot.u[-1] > 1e-12:  # decay fit needs a resolvable tail
        fitted, expected = fit_decay_exponent(pot)
        assert fitted == pytest.approx(expected, rel=0.02)


def test_hand_built_spec_measures_tail_coefficients():
    # a radial spec built from bare callables still normalises accurately:
    # the tail coefficients are extracted numerically from phi samples
    m = 1.0
    spec = MetricSpec(
        kind="conformal", r_min=0.5,
        phi=lambda r: 1.0 + 0.5 * m / np.asarray(r, dtype=float),
        dphi=lambda r: -0.5 * m / np.asarray(r, dtype=float) ** 2,
        d2phi=lambda r: m / np.asarray(r, dtype=float) ** 3,
        label="hand-built")
    c1, c2 = spec.series_coefficients()
    assert c1 == pytest.approx(0.5, abs=1e-8)
    assert c2 == pytest.approx(0.0, abs=1e-6)
    pot = solve_radial(spec, 2.0)
    assert pot.cap_p == pytest.approx(FOUR_PI, rel=1e-9)


def test_explicit_grid_argument(flat_spec):
    r = np.geomspace(1.0, 1e4, 2049)
    pot = solve_radial(flat_spec, 2.0, r_grid=r)
    assert pot.cap_p == pytest.approx(FOUR_PI, rel=1e-8)
    with pytest.raises(ParameterError):
        solve_radial(flat_spec, 2.0, r_grid=np.linspace(1, 100, 101))  # not geometric
