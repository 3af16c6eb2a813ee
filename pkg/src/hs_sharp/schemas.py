"""Pydantic schemas for quadrature parameters, results and reports."""
import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .models import Method


# ============================================================================
# Quadrature
# ============================================================================

class QuadratureSpec(BaseModel):
    """Accuracy parameters shared by every integral route."""

    model_config = ConfigDict(frozen=True)

    base_order: int = Field(32, ge=2, description="Gauss-Legendre order per panel")
    max_refinements: int = Field(10, ge=0, description="Bisection levels before giving up")
    abs_tol: float = Field(1e-12, ge=0, description="Absolute tolerance")
    rel_tol: float = Field(1e-10, ge=0, description="Relative tolerance")

    @model_validator(mode="after")
    def check_tolerances(self) -> "QuadratureSpec":
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("abs_tol and rel_tol cannot both be zero")
        return self

    def tolerance(self, value: float) -> float:
        """Convergence threshold max(abs_tol, rel_tol*|value|)."""
        return max(self.abs_tol, self.rel_tol * abs(value))


# ============================================================================
# Constants
# ============================================================================

class ConstantResult(BaseModel):
    """A computed constant with its error estimate and maximizer."""

    value: float = Field(..., gt=0, description="Constant value")
    abs_err: float = Field(..., ge=0, description="Absolute error estimate")
    argmax_param: Optional[float] = Field(
        None, description="Optimal direction parameter (beta, alpha or t depending on method)"
    )
    argmax_beta: Optional[float] = Field(None, description="Maximizing or evaluated polar angle beta")
    method: Method

    @property
    def rel_err(self) -> float:
        return self.abs_err / self.value


# ============================================================================
# Poisson field reports
# ============================================================================

class SharpnessReport(BaseModel):
    """Achieved ratio |grad u(x)| x_n^{(n+p-1)/p} / ||f||_p against the sharp constant."""

    n: int = Field(..., ge=2)
    p: str = Field(..., description="Exponent label: 1, inf or a decimal")
    ratio: float = Field(..., ge=0, description="Achieved gradient ratio")
    bound: float = Field(..., gt=0, description="Sharp constant C_p")
    gap: float = Field(..., description="1 - ratio/bound")
    quadrature_err: float = Field(..., ge=0, description="Error estimate of ratio")
    directional_ratio: Optional[float] = Field(
        None, ge=0, description="Same ratio for |derivative| along the test direction"
    )
    direction_bound: Optional[float] = Field(None, description="C_p(beta) for the test direction")
    extrapolated_ratio: Optional[float] = Field(None, description="Limit of the extremal family")
    beta: Optional[float] = None
    truncation_radius: Optional[float] = None
    seed: Optional[int] = None
    sample: Optional[int] = None

    @property
    def ratio_over_bound(self) -> float:
        return self.ratio / self.bound

    def within(self, tolerance: float = 1e-3) -> bool:
        """True when ratio <= bound*(1 + tolerance) + quadrature_err."""
        return self.ratio <= self.bound * (1.0 + tolerance) + self.quadrature_err


class OscillationReport(BaseModel):
    """Both sides of |grad u(x)| <= (C_inf/2) osc(f) / x_n."""

    n: int = Field(..., ge=2)
    gradient_norm: float = Field(..., ge=0)
    bound: float = Field(..., ge=0, description="(C_inf/2) osc(f) / x_n")
    oscillation: float = Field(..., ge=0)
    quadrature_err: float = Field(..., ge=0)
    holds: bool


# ============================================================================
# Inequality scans
# ============================================================================

class ScanGrid(BaseModel):
    """Two-parameter grid for inequality scans.

    The first axis is x (or y for the first corollary); the second axis is the
    parameter mu or the dimension n. Integer axes are produced when
    ``integer_second`` is set.
    """

    x_lo: float
    x_hi: float
    x_count: int = Field(..., ge=2)
    x_log_count: int = Field(0, ge=0, description="Extra log-spaced points in (0, x_hi]")
    x_log_lo: float = Field(1e-6, gt=0)
    x_anchors: list[float] = Field(default_factory=list, description="Points always included on the x axis")
    second_lo: float
    second_hi: float
    second_count: int = Field(..., ge=2)
    integer_second: bool = False
    tolerance: float = Field(1e-12, gt=0, description="Allowed positive gap, raw or normalized")
    strict_margin: float = Field(1e-15, gt=0, description="Normalized gaps within this are equalities")
    equality_window: float = Field(
        1e-2, gt=0, description="Equality points within this distance of an expected case are explained"
    )

    @model_validator(mode="after")
    def check_ranges(self) -> "ScanGrid":
        if self.x_lo > self.x_hi:
            raise ValueError("x_lo must not exceed x_hi")
        if self.second_lo > self.second_hi:
            raise ValueError("second_lo must not exceed second_hi")
        return self


class EqualityCase(BaseModel):
    """A grid line or point where the inequality is an equality."""

    variable: str = Field(..., description="x, y, mu, n or point")
    value: Optional[float] = None
    x: Optional[float] = None
    second: Optional[float] = None

    def describe(self) -> str:
        if self.variable == "point":
            return f"({self.x!r},{self.second!r})"
        return f"{self.variable}={self.value!r}"


class InequalityScanReport(BaseModel):
    """Result of scanning one inequality over a grid."""

    inequality: str
    points: int = Field(..., ge=0)
    max_gap: float = Field(..., description="Largest raw LHS - RHS")
    max_rel_gap: float = Field(..., description="Largest normalized gap")
    argmax_x: float
    argmax_second: float
    violations: int = Field(..., ge=0)
    equality_cases: list[EqualityCase] = Field(default_factory=list)
    unexplained_equalities: int = Field(0, ge=0)

    @property
    def passed(self) -> bool:
        return self.violations == 0


# ============================================================================
# CLI records
# ============================================================================

class ReportRecord(BaseModel):
    """One row of the ``constants`` table."""

    n: int = Field(..., ge=2)
    p: str
    method: Method
    value: float = Field(..., gt=0)
    abs_err: float = Field(..., ge=0)
    argmax_beta: Optional[float] = None
    closed_form: Optional[float] = None
    rel_gap: Optional[float] = None
    seed: Optional[int] = None

    @field_validator("value")
    @classmethod
    def check_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("value must be finite")
        return v

    @model_validator(mode="after")
    def check_gap_pairing(self) -> "ReportRecord":
        if (self.closed_form is None) != (self.rel_gap is None):
            raise ValueError("rel_gap is present exactly when closed_form is")
        return self
