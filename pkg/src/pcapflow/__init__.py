"""Level-set analysis of p-capacitary potentials on asymptotically flat 3-manifolds."""

__version__ = "0.1.0"

from .errors import (ConfigError, ConvergenceError, DomainError,
                     GeometryError, NumericError, ParameterError)
from .geometry import (MetricSpec, PointGeometry, check_asymptotic_flatness,
                       horizon_area, metric_at, scalar_curvature)
from .radial import (RadialPotential, radial_capacity, radial_geometry_at,
                     solve_radial)

__all__ = [
    "__version__",
    "ConfigError", "ConvergenceError", "DomainError", "GeometryError",
    "NumericError", "ParameterError",
    "MetricSpec", "PointGeometry", "check_asymptotic_flatness",
    "horizon_area", "metric_at", "scalar_curvature",
    "RadialPotential", "radial_capacity", "radial_geometry_at", "solve_radial",
    # submodules with the heavier machinery
    "epsilon", "levelset", "functional", "mass", "cli",
]
