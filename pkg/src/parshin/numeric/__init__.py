"""Numeric torus oracle: path tracking, monodromy and trapezoidal quadrature."""

from .kernels import USING_NUMBA
from .system import ContinuationError, NumericSystem
from .torus import (
    InadmissibleRadii,
    LocalPoints,
    Monodromy,
    TorusCycle,
    local_monodromy,
    local_points,
    track_torus,
)
from .quadrature import (
    NumericFlagResult,
    PoleProximity,
    QuadratureNotConverged,
    QuadratureResult,
    integrate_component,
    integrate_torus,
    residue_numeric_at_flag,
    write_history_csv,
)
from .radii import RadiiError, admissible, choose_radii

__all__ = [
    "USING_NUMBA", "ContinuationError", "NumericSystem",
    "InadmissibleRadii", "LocalPoints", "Monodromy", "TorusCycle",
    "local_monodromy", "local_points", "track_torus",
    "NumericFlagResult", "PoleProximity", "QuadratureNotConverged", "QuadratureResult",
    "integrate_component", "integrate_torus", "residue_numeric_at_flag", "write_history_csv",
    "RadiiError", "admissible", "choose_radii",
]
