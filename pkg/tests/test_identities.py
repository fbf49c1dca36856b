"""Pointwise identity residuals against the independent sympy oracles."""

import math

import numpy as np
import pytest

import oracles
from pcapflow import MetricSpec, solve_radial
from pcapflow.epsilon import GridConfig, sample_oracle_field
from pcapflow.errors import DomainError
from pcapflow.functional import (div_y_split, divX_residual,
                                 h_identity_residual, kato_residual)


@pytest.fixture(scope="module")
def poly_pot():
    # conformal factor with nonvanishing scalar curvature: honest curvature terms
    spec = MetricSpec.conformal([0.5, 0.1], r_min=0.6)
    return solve_radial(spec, 2.3)


def test_divx_radial_residuals_tiny(schw_pot2, schw_pot25, poly_pot):
    rng = np.random.default_rng(7)
    for pot in (schw_pot2, schw_pot25, poly_pot):
        for r in np.exp(rng.uniform(math.log(pot.spec.r_min * 1.1), math.log(40.0), 30)):
            assert divX_residual(pot, r)["residual"] <= 1e-6


def test_kato_radial_residuals_tiny(schw_pot2, schw_pot25, poly_pot):
    rng = np.random.default_rng(8)
    for pot in (schw_pot2, schw_pot25, poly_pot):
        for r in np.exp(rng.uniform(math.log(pot.spec.r_min * 1.1), math.log(40.0), 30)):
            assert kato_residual(pot, r)["residual"] <= 1e-6


def test_divx_flat_p2_both_sides_vanish(flat_pot2):
    out = divX_residual(flat_pot2, 2.0)
    # the field itself vanishes termwise in this case
    assert abs(out["direct"]) <= 1e-13 * out["scale"]
    assert abs(out["geometric"]) <= 1e-13 * out["scale"]


def test_divx_direct_matches_symbolic_oracle(schw_pot25):
    expr = oracles.divX_direct(oracles.schwarzschild_phi(1))
    for r in (0.8, 2.0, 7.0):
        expected = oracles.numeric(expr, r, schw_pot25.p, schw_pot25.c_p,
                                   schw_pot25.one_minus_at(r))
        assert divX_residual(schw_pot25, r)["direct"] == pytest.approx(expected, rel=1e-10)


def test_div_y_matches_symbolic_oracle(poly_pot):
    phi = oracles.poly_phi([0.5, 0.1])
    P_expr, D_expr = oracles.PD_split(phi)
    for r in (0.8, 1.7, 5.0):
        v = poly_pot.one_minus_at(r)
        out = div_y_split(poly_pot, r)
        assert out["P"] == pytest.approx(
            oracles.numeric(P_expr, r, poly_pot.p, poly_pot.c_p, v), rel=1e-9)
        assert out["D"] == pytest.approx(
            oracles.numeric(D_expr, r, poly_pot.p, poly_pot.c_p, v), rel=1e-9)


def test_div_y_sum_equals_geometric(poly_pot):
    # P + D reproduces the curvature form of the divergence
    phi = oracles.poly_phi([0.5, 0.1])
    dy = oracles.divY_geometric(phi)
    for r in (0.9, 2.5):
        v = poly_pot.one_minus_at(r)
        out = div_y_split(poly_pot, r)
        assert out["P"] + out["D"] == pytest.approx(
            oracles.numeric(dy, r, poly_pot.p, poly_pot.c_p, v), rel=1e-9)


def test_p_nonnegative_radial(schw_pot25, poly_pot):
    rng = np.random.default_rng(9)
    for pot in (schw_pot25, poly_pot):
        for r in np.exp(rng.uniform(math.log(pot.spec.r_min * 1.05), math.log(80.0), 40)):
            assert div_y_split(pot, r)["P"] >= 0.0


def test_near_horizon_domain_error(schw_pot2):
    with pytest.raises(DomainError):
        divX_residual(schw_pot2, 0.2)


# ---------------------------------------------------------------------------
# grid paths


def _band_points(rng, lo, hi, n):
    pts = []
    while len(pts) < n:
        x = rng.uniform(-hi, hi, 3)
        if lo < np.linalg.norm(x) < hi:
            pts.append(x)
    return pts


@pytest.fixture(scope="module")
def grid_fields_flat25(flat_pot25):
    fields = {}
    for h in (1 / 8, 1 / 16):
        fields[h] = sample_oracle_field(flat_pot25, 0.0,
                                        GridConfig(r_in=1.0, r_out=3.0, h=h))
    return fields


def test_grid_divx_refinement_order(grid_fields_flat25):
    rng = np.random.default_rng(11)
    pts = _band_points(rng, 1.8, 2.3, 12)
    res = {h: np.array([divX_residual(f, x)["residual"] for x in pts])
           for h, f in grid_fields_flat25.items()}
    ratios = res[1 / 8] / res[1 / 16]
    assert np.median(ratios) >= 3.5


def test_grid_kato_refinement_order(grid_fields_flat25):
    rng = np.random.default_rng(12)
    pts = _band_points(rng, 1.8, 2.3, 12)
    res = {h: np.array([kato_residual(f, x)["residual"] for x in pts])
           for h, f in grid_fields_flat25.items()}
    assert np.log2(np.median(res[1 / 8] / res[1 / 16])) >= 1.0


def test_grid_p_nonnegative_everywhere(schw_sample_p2):
    # the nonnegative part of the split, vectorised over every interior node
    from pcapflow.fields import field_data
    from pcapflow.functional import _grid_identity_cache
    f = schw_sample_p2
    cache = _grid_identity_cache(f)
    interior = field_data(f).interior_mask(4)
    w = cache["w"]
    p = f.p
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pref = cache["Phi"] * w / cache["B"]
        P_arr = pref * (cache["tangw2"] / w**2 + cache["ring2"]
                        + (p - 1) * (3 - p) / 2 * cache["wdotu"] ** 2 / w**4)
    vals = P_arr[interior]
    assert vals.size > 10_000
    assert np.all(vals >= 0.0)
    assert np.all(np.isfinite(vals))


def test_grid_p_nonnegative_and_d_bounded(schw_sample_p2, schw_pot2):
    rng = np.random.default_rng(13)
    pts = _band_points(rng, 1.3, 2.2, 200)
    d_vals = []
    for x in pts:
        out = div_y_split(schw_sample_p2, x)
        assert out["P"] >= 0.0
        d_vals.append(out["D"])
    d_vals = np.abs(d_vals)
    # bounded, and consistent with the radial closed form at matching radii
    assert d_vals.max() < 10.0 * abs(div_y_split(schw_pot2, 1.3)["D"]) + 1.0


def test_grid_d_stable_under_refinement(flat_pot25):
    rng = np.random.default_rng(14)
    pts = _band_points(rng, 1.8, 2.3, 10)
    maxima = []
    for h in (1 / 8, 1 / 16):
        f = sample_oracle_field(flat_pot25, 0.0, GridConfig(r_in=1.0, r_out=3.0, h=h))
        maxima.append(max(abs(div_y_split(f, x)["D"]) for x in pts))
    assert maxima[1] < 1.5 * maxima[0] + 0.1


def test_grid_identity_near_critical_guard(flat_sample_p2):
    with pytest.raises(DomainError):
        divX_residual(flat_sample_p2, (2.95, 0.0, 0.0))  # too close to the cut


def test_h_consistency_on_solved_field(flat_field_p25):
    # geometric H vs the regularized-equation form, on the solved field
    rng = np.random.default_rng(15)
    pts = _band_points(rng, 1.6, 2.4, 20)
    res = [h_identity_residual(flat_field_p25, x)["residual"] for x in pts]
    assert np.median(res) <= 0.05


def test_h_consistency_refines(flat_pot25):
    rng = np.random.default_rng(16)
    pts = _band_points(rng, 1.8, 2.3, 10)
    med = []
    for h in (1 / 8, 1 / 16):
        f = sample_oracle_field(flat_pot25, 0.0, GridConfig(r_in=1.0, r_out=3.0, h=h))
        med.append(np.median([h_identity_residual(f, x)["residual"] for x in pts]))
    assert med[1] < 0.6 * med[0]


def test_grid_identity_requires_unregularized(flat_pot25):
    from pcapflow.errors import ParameterError
    f = sample_oracle_field(flat_pot25, 0.05, GridConfig(r_in=1.0, r_out=3.0, h=1 / 8))
    with pytest.raises(ParameterError):
        divX_residual(f, (2.0, 0.0, 0.0))
