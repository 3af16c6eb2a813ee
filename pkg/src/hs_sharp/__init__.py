"""hs-sharp - sharp constants in gradient estimates of harmonic functions in the half-space."""

__version__ = "1.0.0"

from .constants_closed import (
    c1_closed,
    c2_closed,
    cinf_closed,
    closed_constant,
    oscillation_constant,
)
from .models import Direction, Exponent, ExponentKind, HalfSpacePoint, Method
from .quadrature import NonConvergenceError
from .schemas import (
    ConstantResult,
    InequalityScanReport,
    OscillationReport,
    QuadratureSpec,
    ReportRecord,
    ScanGrid,
    SharpnessReport,
)
from .special_fn import DomainError
from .variational import cp_direction, direction_profile, sup_over_direction

__all__ = [
    "__version__",
    # Closed forms
    "c1_closed",
    "c2_closed",
    "cinf_closed",
    "closed_constant",
    "oscillation_constant",
    # Types
    "Direction",
    "Exponent",
    "ExponentKind",
    "HalfSpacePoint",
    "Method",
    # Schemas
    "ConstantResult",
    "InequalityScanReport",
    "OscillationReport",
    "QuadratureSpec",
    "ReportRecord",
    "ScanGrid",
    "SharpnessReport",
    # Errors
    "DomainError",
    "NonConvergenceError",
    # Numerical constants
    "cp_direction",
    "direction_profile",
    "sup_over_direction",
]
