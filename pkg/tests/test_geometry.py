import math

import numpy as np
import pytest

import oracles
from pcapflow import MetricSpec, check_asymptotic_flatness, horizon_area, metric_at, scalar_curvature
from pcapflow.errors import DomainError, ParameterError
from pcapflow.geometry import (conformal_mean_curvature, conformal_ric_normal,
                               conformal_scalar_curvature)

FOUR_PI = 4 * math.pi


def test_flat_metric_at_is_identity(flat_spec):
    pg = metric_at(flat_spec, (2.0, 0.0, 0.0))
    assert np.allclose(pg.g, np.eye(3))
    assert pg.sqrt_det == pytest.approx(1.0)
    assert pg.scalar_curvature == pytest.approx(0.0, abs=1e-14)


def test_schwarzschild_metric_at_horizon(schw_spec):
    # phi(0.5) = 2, so g = 16 delta and sqrt(det g) = 64
    pg = metric_at(schw_spec, (0.5, 0.0, 0.0))
    assert np.allclose(pg.g, 16.0 * np.eye(3), rtol=1e-14)
    assert pg.sqrt_det == pytest.approx(64.0, rel=1e-14)


def test_schwarzschild_scalar_curvature_vanishes(schw_spec):
    for x in [(1.0, 0.0, 0.0), (0.5, 0.3, -0.2), (7.0, 1.0, 2.0)]:
        assert abs(scalar_curvature(schw_spec, x)) < 1e-10


def test_conformal_curvature_matches_symbolic_oracle(poly_spec):
    expr = oracles.scalar_curvature_expr(oracles.poly_phi([0.5, 0.1]))
    for r in (0.7, 2.0, 3.0, 9.0):
        expected = oracles.numeric(expr, r)
        got = float(conformal_scalar_curvature(poly_spec, r))
        assert got == pytest.approx(expected, rel=1e-8)


def test_conformal_curvature_frozen_value(poly_spec):
    # independent sympy evaluation of -8 phi^-5 lap(phi) at r = 2 and 3
    assert float(conformal_scalar_curvature(poly_spec, 2.0)) == pytest.approx(
        -0.029678987176506684, rel=1e-10)
    assert float(conformal_scalar_curvature(poly_spec, 3.0)) == pytest.approx(
        -0.0087160193283096908, rel=1e-10)


def test_ricci_normal_matches_symbolic_oracle(poly_spec):
    expr = oracles.ricci_normal_normal_expr(oracles.poly_phi([0.5, 0.1]))
    for r in (0.8, 2.0, 5.0):
        assert float(conformal_ric_normal(poly_spec, r)) == pytest.approx(
            oracles.numeric(expr, r), rel=1e-10, abs=1e-14)


def test_ricci_quadratic_form_traces_to_scalar(schw_spec, poly_spec):
    for spec in (schw_spec, poly_spec):
        x = np.array([1.3, 0.4, -0.2])
        pg = metric_at(spec, x)
        # trace of Ric against g^{-1} equals R: sum over an orthonormal frame
        r = np.linalg.norm(x)
        ph = float(spec.phi(r))
        frame = np.eye(3) / ph**2
        total = sum(pg.ricci(frame[i]) for i in range(3))
        assert total == pytest.approx(pg.scalar_curvature, rel=1e-10, abs=1e-13)


def test_traced_gauss_equation_radial(schw_spec, poly_spec):
    # 2 / (r^2 phi^4) = R - 2 Ric(nu, nu) + H^2 / 2 for coordinate spheres
    for spec in (schw_spec, poly_spec):
        for r in (0.8, 1.5, 4.0):
            ph = float(spec.phi(r))
            lhs = 2.0 / (r**2 * ph**4)
            H = float(conformal_mean_curvature(spec, r))
            rhs = (float(conformal_scalar_curvature(spec, r))
                   - 2.0 * float(conformal_ric_normal(spec, r)) + H**2 / 2.0)
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_positive_definite_at_samples(schw_spec, poly_spec):
    rng = np.random.default_rng(0)
    for spec in (schw_spec, poly_spec):
        for _ in range(20):
            x = rng.uniform(-5, 5, 3)
            if np.linalg.norm(x) < spec.r_min:
                continue
            pg = metric_at(spec, x)
            assert np.linalg.eigvalsh(pg.g)[0] > 0
            pg.check()  # inverse consistency and positive volume density


def test_sampled_grid_matches_closed_form_second_order(schw_spec):
    def gamma(x):
        r = max(float(np.linalg.norm(x)), 0.5)
        return (float(schw_spec.phi(r)) ** 4 - 1.0) * np.eye(3)

    x = np.array([1.2, 0.7, -0.4])
    exact = scalar_curvature(schw_spec, x)  # 0 for this metric
    errs = []
    for h in (0.04, 0.02):
        spec = MetricSpec.sampled(gamma, ((-8,) * 3, (8,) * 3), tau=1.0, fd_step=h)
        errs.append(abs(scalar_curvature(spec, x) - exact))
    order = math.log2(errs[0] / errs[1])
    assert order >= 1.8


def test_sampled_grid_off_diagonal_curvature(schw_spec):
    # a linear change of chart x -> A x produces off-diagonal components but
    # cannot change the scalar curvature; Schwarzschild keeps R = 0
    A = np.array([[1.0, 0.06, -0.03], [0.0, 0.95, 0.05], [0.02, 0.0, 1.05]])

    def gamma(y):
        r = max(float(np.linalg.norm(A @ y)), 0.51)
        g = float(schw_spec.phi(r)) ** 4 * (A.T @ A)
        return g - np.eye(3)

    spec = MetricSpec.sampled(gamma, ((-8,) * 3, (8,) * 3), tau=1.0, fd_step=0.01)
    for y in ([1.4, 0.3, -0.2], [0.0, 2.0, 0.7]):
        assert abs(scalar_curvature(spec, np.asarray(y))) < 2e-3  # O(fd_step^2)


def test_sampled_grid_positive_definite_check():
    spec = MetricSpec.sampled(lambda x: -2.0 * np.eye(3), ((-4,) * 3, (4,) * 3), tau=1.0)
    with pytest.raises(DomainError):
        metric_at(spec, (1.0, 0.0, 0.0))


def test_domain_errors(schw_spec):
    with pytest.raises(DomainError):
        metric_at(schw_spec, (0.1, 0.0, 0.0))
    grid = MetricSpec.sampled(lambda x: np.zeros((3, 3)), ((-2,) * 3, (2,) * 3), tau=1.0)
    with pytest.raises(DomainError):
        metric_at(grid, (3.0, 0.0, 0.0))


def test_decay_report_flat(flat_spec):
    rep = check_asymptotic_flatness(flat_spec, [10.0, 20.0, 40.0])
    assert not rep.failing
    assert np.all(rep.gamma_measure == 0.0)
    assert np.all(rep.dgamma_measure == 0.0)


def test_decay_report_schwarzschild(schw_spec):
    rep = check_asymptotic_flatness(schw_spec, [10.0, 20.0, 40.0])
    assert not rep.failing
    # leading term of phi^4 - 1 is 2m/r, so the measure approaches 2m = 2
    assert rep.gamma_measure[-1] == pytest.approx(2.0, rel=0.1)
    assert np.max(rep.gamma_measure) < 2.5


def test_decay_report_flags_slow_decay():
    def gamma(x):
        return np.eye(3) / np.linalg.norm(x) ** 0.3

    spec = MetricSpec.sampled(gamma, ((-100,) * 3, (100,) * 3), tau=0.6, fd_step=1e-2)
    rep = check_asymptotic_flatness(spec, [10.0, 20.0, 40.0])
    assert rep.failing


def test_horizon_areas(flat_spec, schw_spec):
    assert horizon_area(flat_spec) == pytest.approx(FOUR_PI, rel=1e-14)
    assert horizon_area(schw_spec) == pytest.approx(16 * math.pi, rel=1e-14)
    assert horizon_area(MetricSpec.schwarzschild(2.0)) == pytest.approx(64 * math.pi, rel=1e-14)


def test_schwarzschild_mean_curvature_values(schw_spec):
    # horizon is minimal
    assert abs(float(conformal_mean_curvature(schw_spec, 0.5))) < 1e-14
    # far field: H approaches 2 / areal radius
    h100 = float(conformal_mean_curvature(schw_spec, 100.0))
    approx = 0.02 / 1.005**2 * (1 - 1.0 / 200.0)
    assert h100 == pytest.approx(approx, rel=0.02)
    assert h100 == pytest.approx(0.019604460310265213, rel=1e-12)


def test_constructor_validation():
    with pytest.raises(ParameterError):
        MetricSpec.flat(-1.0)
    with pytest.raises(ParameterError):
        MetricSpec.schwarzschild(0.0)
    with pytest.raises(ParameterError):
        MetricSpec.conformal([-10.0], r_min=1.0)  # phi goes negative
