"""Enums and small value types shared across hs-sharp modules.

The exponent p of the boundary norm is a three-way value (one, finite, infinity),
directions are stored by their polar angle beta from the inward normal e_n, and
points of the half-space keep the distance to the boundary separately.
"""
import enum
import math
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .special_fn import DomainError


class ExponentKind(str, enum.Enum):
    """Variant of the boundary-norm index p."""
    ONE = "one"
    FINITE = "finite"
    INFINITY = "infinity"


class Method(str, enum.Enum):
    """Route that produced a constant."""
    CLOSED_FORM = "closed_form"
    HEMISPHERE_QUADRATURE = "hemisphere_quadrature"
    DOUBLE_INTEGRAL = "double_integral"
    ALPHA_INTEGRAL = "alpha_integral"
    HEMISPHERE_SUP = "hemisphere_sup"
    GAMMA_SUP = "gamma_sup"
    ALPHA_SUP = "alpha_sup"
    DIRECTION_SCAN = "direction_scan"


class Exponent(BaseModel):
    """Boundary-norm index p in [1, inf].

    Finite exponents require p > 1; p = 1 and p = inf are separate variants so
    the conjugate exponent q = p/(p-1) is always well defined (q = inf for
    p = 1 and q = 1 for p = inf).
    """

    model_config = ConfigDict(frozen=True)

    kind: ExponentKind
    value: Optional[float] = Field(None, description="p for the finite variant")

    @model_validator(mode="after")
    def check_value(self) -> "Exponent":
        if self.kind == ExponentKind.FINITE:
            if self.value is None or not math.isfinite(self.value) or self.value <= 1.0:
                raise ValueError("finite exponent requires 1 < p < inf")
        elif self.value is not None:
            raise ValueError(f"{self.kind.value} exponent carries no value")
        return self

    @classmethod
    def one(cls) -> "Exponent":
        return cls(kind=ExponentKind.ONE)

    @classmethod
    def finite(cls, p: float) -> "Exponent":
        return cls(kind=ExponentKind.FINITE, value=float(p))

    @classmethod
    def infinity(cls) -> "Exponent":
        return cls(kind=ExponentKind.INFINITY)

    @classmethod
    def parse(cls, token: str) -> "Exponent":
        """Parse a CLI token: ``1``, ``inf`` or a decimal literal greater than 1.

        Raises:
            DomainError: If the token is not one of the accepted forms
        """
        text = token.strip().lower()
        if text in ("inf", "infinity"):
            return cls.infinity()
        try:
            p = float(text)
        except ValueError:
            raise DomainError(f"cannot parse exponent {token!r}", "p", token) from None
        if not math.isfinite(p):
            raise DomainError(f"cannot parse exponent {token!r}", "p", token)
        if p == 1.0:
            return cls.one()
        if p < 1.0:
            raise DomainError(f"exponent must be at least 1, got {token!r}", "p", token)
        return cls.finite(p)

    @property
    def is_one(self) -> bool:
        return self.kind == ExponentKind.ONE

    @property
    def is_finite(self) -> bool:
        return self.kind == ExponentKind.FINITE

    @property
    def is_infinity(self) -> bool:
        return self.kind == ExponentKind.INFINITY

    @property
    def p(self) -> float:
        """Numeric p (1.0, the finite value, or inf)."""
        if self.kind == ExponentKind.ONE:
            return 1.0
        if self.kind == ExponentKind.INFINITY:
            return math.inf
        return float(self.value)

    @property
    def conjugate(self) -> float:
        """q = p/(p-1); inf for p = 1 and 1 for p = inf."""
        if self.kind == ExponentKind.ONE:
            return math.inf
        if self.kind == ExponentKind.INFINITY:
            return 1.0
        return self.value / (self.value - 1.0)

    @property
    def label(self) -> str:
        """Text form used in reports: ``1``, ``inf`` or the shortest repr of p."""
        if self.kind == ExponentKind.ONE:
            return "1"
        if self.kind == ExponentKind.INFINITY:
            return "inf"
        return repr(float(self.value))

    def scaling_power(self, n: int) -> float:
        """Power of x_n in the sharp coefficient's inverse, (n+p-1)/p."""
        if self.kind == ExponentKind.INFINITY:
            return 1.0
        return (n + self.p - 1.0) / self.p

    def __str__(self) -> str:
        return self.label


class Direction(BaseModel):
    """Unit vector z stored by its polar angle beta from e_n.

    Only beta is ever read: every constant depends on z through beta alone,
    so reflecting z' never changes a result.
    """

    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., description="Polar angle from the inward normal, in [0, pi/2]")

    @field_validator("beta")
    @classmethod
    def check_beta(cls, v: float) -> float:
        if not (0.0 <= v <= math.pi / 2):
            raise ValueError(f"beta must lie in [0, pi/2], got {v}")
        return v

    @classmethod
    def normal(cls) -> "Direction":
        return cls(beta=0.0)

    @classmethod
    def tangential(cls) -> "Direction":
        return cls(beta=math.pi / 2)

    @classmethod
    def from_gamma(cls, gamma: float) -> "Direction":
        """Build from gamma = |z'|/z_n (inf allowed for the tangential limit)."""
        if gamma < 0:
            raise DomainError("gamma must be nonnegative", "gamma", gamma)
        return cls(beta=math.atan(gamma) if math.isfinite(gamma) else math.pi / 2)

    @classmethod
    def from_alpha(cls, alpha: float, n: int) -> "Direction":
        """Build from alpha = n*gamma/(2*sqrt(n-1))."""
        if alpha < 0:
            raise DomainError("alpha must be nonnegative", "alpha", alpha)
        return cls.from_gamma(2.0 * math.sqrt(n - 1) * alpha / n)

    @property
    def gamma(self) -> float:
        if self.beta == math.pi / 2:
            return math.inf
        return math.tan(self.beta)

    def alpha(self, n: int) -> float:
        return n * self.gamma / (2.0 * math.sqrt(n - 1))

    def unit_vector(self, n: int) -> np.ndarray:
        """The representative (sin beta, 0, ..., 0, cos beta) in R^n."""
        z = np.zeros(n)
        z[0] = math.sin(self.beta)
        z[-1] = math.cos(self.beta)
        return z


class HalfSpacePoint(BaseModel):
    """Point x = (x', x_n) of the upper half-space."""

    model_config = ConfigDict(frozen=True)

    x_prime: tuple[float, ...] = Field(..., description="Boundary coordinates, length n-1")
    x_n: float = Field(..., gt=0, description="Distance to the boundary")

    @field_validator("x_prime")
    @classmethod
    def check_x_prime(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if len(v) < 1:
            raise ValueError("x_prime needs at least one coordinate (n >= 2)")
        if not all(math.isfinite(c) for c in v):
            raise ValueError("x_prime must be finite")
        return v

    @classmethod
    def above_origin(cls, n: int, height: float = 1.0) -> "HalfSpacePoint":
        return cls(x_prime=(0.0,) * (n - 1), x_n=height)

    @property
    def dim(self) -> int:
        return len(self.x_prime) + 1

    @property
    def prime(self) -> np.ndarray:
        return np.asarray(self.x_prime, dtype=float)

    def scaled(self, factor: float) -> "HalfSpacePoint":
        return HalfSpacePoint(x_prime=tuple(factor * c for c in self.x_prime), x_n=factor * self.x_n)

    def shifted(self, axis: int, h: float) -> "HalfSpacePoint":
        """Move by h along coordinate ``axis`` (0-based; axis n-1 is x_n)."""
        if axis == len(self.x_prime):
            return HalfSpacePoint(x_prime=self.x_prime, x_n=self.x_n + h)
        coords = list(self.x_prime)
        coords[axis] += h
        return HalfSpacePoint(x_prime=tuple(coords), x_n=self.x_n)
