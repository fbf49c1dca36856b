import pytest

from pcapflow import MetricSpec, solve_radial
from pcapflow.epsilon import GridConfig, sample_oracle_field, solve_regularized


@pytest.fixture(scope="session")
def flat_spec():
    return MetricSpec.flat(1.0)


@pytest.fixture(scope="session")
def schw_spec():
    return MetricSpec.schwarzschild(1.0)


@pytest.fixture(scope="session")
def poly_spec():
    return MetricSpec.conformal([0.5, 0.1], r_min=0.6)


@pytest.fixture(scope="session")
def flat_pot2(flat_spec):
    return solve_radial(flat_spec, 2.0)


@pytest.fixture(scope="session")
def flat_pot25(flat_spec):
    return solve_radial(flat_spec, 2.5)


@pytest.fixture(scope="session")
def schw_pot2(schw_spec):
    return solve_radial(schw_spec, 2.0)


@pytest.fixture(scope="session")
def schw_pot25(schw_spec):
    return solve_radial(schw_spec, 2.5)


@pytest.fixture(scope="session")
def flat_field_p2(flat_spec):
    """Small solved field: flat annulus [1, 3], p = 2, h = 1/8."""
    cfg = GridConfig(r_in=1.0, r_out=3.0, h=1 / 8, T=None)
    return solve_regularized(flat_spec, 2.0, 1e-3, cfg)


@pytest.fixture(scope="session")
def flat_field_p25(flat_spec):
    """Small solved field: flat annulus [1, 3], p = 2.5, h = 1/8."""
    cfg = GridConfig(r_in=1.0, r_out=3.0, h=1 / 8, T=None)
    return solve_regularized(flat_spec, 2.5, 1e-3, cfg)


@pytest.fixture(scope="session")
def schw_field_p2(schw_spec):
    """Small solved field on Schwarzschild: annulus [0.5, 3], p = 2."""
    cfg = GridConfig(r_in=0.5, r_out=3.0, h=1 / 8, T=None)
    return solve_regularized(schw_spec, 2.0, 1e-3, cfg)


@pytest.fixture(scope="session")
def flat_sample_p2(flat_pot2):
    """Oracle-sampled (exactly p-harmonic) field on the flat annulus."""
    cfg = GridConfig(r_in=1.0, r_out=3.0, h=1 / 8, T=None)
    return sample_oracle_field(flat_pot2, 0.0, cfg)


@pytest.fixture(scope="session")
def schw_sample_p2(schw_pot2):
    cfg = GridConfig(r_in=0.5, r_out=3.0, h=1 / 8, T=None)
    return sample_oracle_field(schw_pot2, 0.0, cfg)
