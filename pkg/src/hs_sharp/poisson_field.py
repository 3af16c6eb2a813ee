"""Poisson integrals of boundary data, extremal data and empirical sharpness ratios.

Boundary points are written along rays from x', y' = x' + x_n tan(theta) omega
with theta in [0, pi/2) and omega on the unit sphere of R^{n-1}. In these
coordinates the Poisson kernel times dy' is (2/omega_n) sin^{n-2}theta and

    grad u(x) = (2 / (omega_n x_n)) int int (n cos t sin t omega, 1 - n cos^2 t) f sin^{n-2}t,

so every integrand is bounded on a finite domain. Boundary data can declare
the theta values where it is not smooth along each ray (support spheres,
kernel sign changes); the theta range is split there. Compact data whose
support lies away from x' is integrated along rays from its own center
instead, with the kernel evaluated at y' directly.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .constants_closed import closed_constant, oscillation_constant
from .models import Direction, Exponent, HalfSpacePoint
from .quadrature import DEFAULT_SPEC, ROUNDING_FACTOR, NonConvergenceError, QuadratureResult, gauss_legendre
from .schemas import OscillationReport, QuadratureSpec, SharpnessReport
from .special_fn import DomainError, ball_volume, half_ball_moment, sphere_area
from .variational import c1_maximizer, cp_direction, parallel_map, sup_over_direction, theta_star

logger = logging.getLogger("hs-sharp.poisson_field")

HALF_PI = 0.5 * math.pi

# Refinement levels of the ray rule; each doubles the theta and sphere orders
MAX_RAY_LEVELS = 6
MAX_THETA_ORDER = 256
# Quadrature points per chunk of sphere nodes
CHUNK_POINTS = 1 << 18

MIN_TRUNCATION_FACTOR = 10.0
DEFAULT_TRUNCATION_FACTOR = 1e3
DEFAULT_BUMP_SCALE = 16
EXTREMAL_BUMP_POWER = 4
# Largest beta for random sign data; tan theta* grows like n tan(beta)
MAX_RANDOM_BETA = 1.2
# Tolerance floor for random-sample integrals; their ratios are compared with C_p to 1e-3
RANDOM_REL_TOL = 1e-6
RANDOM_ABS_TOL = 1e-9

BreakFunction = Callable[[np.ndarray, float, np.ndarray], np.ndarray]
ComponentFunction = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


class UnboundedDataError(ValueError):
    """Boundary data is not finite at a queried point."""

    def __init__(self, message: str, point: tuple[float, ...]):
        super().__init__(message)
        self.point = point


class BoundaryData(BaseModel):
    """Boundary function f on R^{n-1} with what is known about it.

    ``eval_fn`` maps an array of shape (..., n-1) to values of shape (...).
    ``norm_fn`` returns ||f||_p exactly when known; otherwise the norm is
    computed along rays from (center, anchor_height) over the support ball.
    ``ray_breaks(origin, height, omega)`` returns, for M sphere directions,
    an (M, k) array of theta values where f is not smooth along the ray
    (NaN where there is none).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    dim: int = Field(..., ge=2, description="Dimension n of the half-space")
    eval_fn: Callable[[np.ndarray], np.ndarray]
    norm_fn: Optional[Callable[[Exponent], float]] = None
    center: tuple[float, ...] = Field(..., description="Center of the support ball")
    support_radius: Optional[float] = Field(None, gt=0, description="None for unbounded support")
    anchor_height: float = Field(1.0, gt=0, description="Ray origin height for computed norms")
    ray_breaks: Optional[BreakFunction] = None
    sup_value: Optional[float] = None
    inf_value: Optional[float] = None
    description: str = ""

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(self.eval_fn(np.asarray(y, dtype=float)), dtype=float)

    @property
    def bounded_support(self) -> bool:
        return self.support_radius is not None

    @property
    def oscillation(self) -> Optional[float]:
        """sup f - inf f over the boundary, or None when not declared."""
        if self.sup_value is None or self.inf_value is None:
            return None
        return self.sup_value - self.inf_value


class FieldValue(NamedTuple):
    value: float
    gradient: np.ndarray
    value_err: float
    gradient_err: np.ndarray


# ============================================================================
# Ray quadrature
# ============================================================================

@lru_cache(maxsize=32)
def sphere_rule(m: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Product rule on the unit sphere S^m of R^{m+1}.

    S^0 is the pair of points +-1; S^1 uses 2*order equally spaced angles;
    higher spheres are built recursively from Gauss-Legendre nodes in the
    polar angle chi, weighted by sin^{m-1}chi. Weights sum to omega_{m+1}.

    Returns:
        (points of shape (K, m+1), weights of shape (K,)), read-only
    """
    if m == 0:
        points, weights = np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    elif m == 1:
        count = 2 * order
        angles = 2.0 * math.pi * (np.arange(count) + 0.5) / count
        points = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        weights = np.full(count, 2.0 * math.pi / count)
    else:
        nodes, gl_weights = gauss_legendre(order)
        chi = HALF_PI * (nodes + 1.0)
        chi_weights = HALF_PI * gl_weights * np.sin(chi) ** (m - 1)
        sub_points, sub_weights = sphere_rule(m - 1, order)
        points = np.concatenate(
            [
                np.repeat(np.cos(chi), sub_points.shape[0])[:, None],
                (np.sin(chi)[:, None, None] * sub_points[None, :, :]).reshape(-1, m),
            ],
            axis=1,
        )
        weights = np.outer(chi_weights, sub_weights).ravel()
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


def _level_orders(spec: QuadratureSpec, level: int) -> tuple[int, int]:
    theta_order = min(spec.base_order * 2 ** level, MAX_THETA_ORDER)
    sphere_order = max(4, spec.base_order // 4) * 2 ** level
    return theta_order, sphere_order


def _theta_limit(data: BoundaryData, origin: np.ndarray, height: float) -> float:
    if data.support_radius is None:
        return HALF_PI
    reach = float(np.linalg.norm(origin - np.asarray(data.center))) + data.support_radius
    return math.atan(reach / height)


def _piece_edges(
    data: BoundaryData,
    origin: np.ndarray,
    height: float,
    omega: np.ndarray,
    theta_max: float
) -> np.ndarray:
    count = omega.shape[0]
    columns = [np.zeros((count, 1)), np.full((count, 1), theta_max)]
    if data.ray_breaks is not None:
        breaks = np.asarray(data.ray_breaks(origin, height, omega), dtype=float).reshape(count, -1)
        columns.append(np.where(np.isnan(breaks), theta_max, np.clip(breaks, 0.0, theta_max)))
    return np.sort(np.concatenate(columns, axis=1), axis=1)


def _ray_level(
    data: BoundaryData,
    origin: np.ndarray,
    height: float,
    components: ComponentFunction,
    theta_max: float,
    theta_order: int,
    sphere_order: int
) -> tuple[np.ndarray, np.ndarray]:
    points, sphere_weights = sphere_rule(data.dim - 2, sphere_order)
    nodes, gl_weights = gauss_legendre(theta_order)
    total: Optional[np.ndarray] = None
    magnitude: Optional[np.ndarray] = None

    pieces_guess = 2 + (4 if data.ray_breaks is not None else 0)
    chunk = max(1, CHUNK_POINTS // (theta_order * pieces_guess))
    for start in range(0, points.shape[0], chunk):
        omega = points[start:start + chunk]
        weights = sphere_weights[start:start + chunk]
        edges = _piece_edges(data, origin, height, omega, theta_max)
        lo, hi = edges[:, :-1], edges[:, 1:]
        half = 0.5 * (hi - lo)
        theta = (0.5 * (hi + lo))[..., None] + half[..., None] * nodes
        theta = np.where(half[..., None] > 0.0, theta, 0.0)
        omega_b = omega[:, None, None, :]
        y = origin + (height * np.tan(theta))[..., None] * omega_b
        f = data(y)
        if not np.all(np.isfinite(f)):
            bad = np.argwhere(~np.isfinite(f))[0]
            point = tuple(float(c) for c in y[tuple(bad)])
            raise UnboundedDataError(f"boundary data is not finite at y'={point}", point)
        values = components(theta, omega_b, f)
        quad_weights = half[..., None] * gl_weights * weights[:, None, None]
        part = (values * quad_weights).sum(axis=(1, 2, 3))
        part_mag = (np.abs(values) * quad_weights).sum(axis=(1, 2, 3))
        total = part if total is None else total + part
        magnitude = part_mag if magnitude is None else magnitude + part_mag
    return total, magnitude


def ray_integrals(
    data: BoundaryData,
    origin: np.ndarray,
    height: float,
    components: ComponentFunction,
    spec: Optional[QuadratureSpec] = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Integrate several ray integrands at once, refining until each converges.

    Args:
        data: Boundary data
        origin: Ray origin x' on the boundary
        height: x_n
        components: (theta, omega, f) -> array of shape (k, ...) of integrands
            with respect to dtheta domega
        spec: Accuracy parameters

    Returns:
        (values, error estimates), each of shape (k,)

    Raises:
        UnboundedDataError: If f is not finite at a node
        NonConvergenceError: If some component is unconverged after the last level
    """
    spec = spec or DEFAULT_SPEC
    theta_max = _theta_limit(data, origin, height)
    levels = max(2, min(MAX_RAY_LEVELS, spec.max_refinements + 1))
    previous: Optional[np.ndarray] = None
    diff = np.zeros(1)
    for level in range(levels):
        theta_order, sphere_order = _level_orders(spec, level)
        total, magnitude = _ray_level(data, origin, height, components, theta_max, theta_order, sphere_order)
        if previous is not None:
            diff = np.abs(total - previous)
            floor = ROUNDING_FACTOR * magnitude
            tol = np.maximum(np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total)), floor)
            if np.all(diff <= tol):
                logger.debug(f"ray integrals converged at level {level} (theta order {theta_order})")
                return total, np.maximum(diff, floor)
        previous = total

    worst = float(diff.max())
    raise NonConvergenceError(
        f"ray integrals not converged after {levels} levels (worst difference {worst!r})",
        best_estimate=float(previous[0]),
        error_estimate=worst,
        refinements=levels,
    )


# ============================================================================
# Poisson integral
# ============================================================================

def _check_point(data: BoundaryData, x: HalfSpacePoint) -> None:
    if data.dim != x.dim:
        raise DomainError(f"data is {data.dim}-dimensional but x is {x.dim}-dimensional", "x", x.dim)


def _field_components(n: int, height: float) -> ComponentFunction:
    prefactor = 2.0 / sphere_area(n)

    def components(theta: np.ndarray, omega: np.ndarray, f: np.ndarray) -> np.ndarray:
        s, c = np.sin(theta), np.cos(theta)
        base = prefactor * f * s ** (n - 2)
        radial = base * n * c * s / height
        rows = [base]
        rows.extend(radial * omega[..., i] for i in range(n - 1))
        rows.append(base * (1.0 - n * c * c) / height)
        return np.stack(rows)

    return components


def _anchored_components(x: HalfSpacePoint, center: np.ndarray, height: float) -> ComponentFunction:
    """Field integrands along rays from (center, height) instead of from x."""
    n, x_n = x.dim, x.x_n
    prefactor = 2.0 / sphere_area(n)

    def components(theta: np.ndarray, omega: np.ndarray, f: np.ndarray) -> np.ndarray:
        t, c = np.tan(theta), np.cos(theta)
        d = center - x.prime + (height * t)[..., None] * omega
        rho2 = x_n * x_n + np.sum(d * d, axis=-1)
        jacobian = height ** (n - 1) * t ** (n - 2) / (c * c)
        base = prefactor * f * jacobian * rho2 ** (-0.5 * n)
        rows = [base * x_n]
        rows.extend(base * n * x_n * d[..., i] / rho2 for i in range(n - 1))
        rows.append(base * (1.0 - n * x_n * x_n / rho2))
        return np.stack(rows)

    return components


def _excludes_point(data: BoundaryData, x: HalfSpacePoint) -> bool:
    if data.support_radius is None:
        return False
    return float(np.linalg.norm(x.prime - np.asarray(data.center))) > data.support_radius


def poisson_field(data: BoundaryData, x: HalfSpacePoint, spec: Optional[QuadratureSpec] = None) -> FieldValue:
    """
    u(x) and grad u(x) in one pass over the same ray nodes.

    Every component is converged independently. Rays start at x' unless the
    support ball of the data lies away from x'; then they start at the
    support center, at the data's anchor height, and the kernel is
    evaluated directly.

    Raises:
        DomainError: If data and x have different dimensions
        UnboundedDataError: If f is not finite on a queried ray
        NonConvergenceError: From the ray quadrature
    """
    _check_point(data, x)
    if _excludes_point(data, x):
        center = np.asarray(data.center, dtype=float)
        components = _anchored_components(x, center, data.anchor_height)
        values, errors = ray_integrals(data, center, data.anchor_height, components, spec)
    else:
        values, errors = ray_integrals(data, x.prime, x.x_n, _field_components(x.dim, x.x_n), spec)
    return FieldValue(float(values[0]), values[1:].copy(), float(errors[0]), errors[1:].copy())


def poisson_eval(data: BoundaryData, x: HalfSpacePoint, spec: Optional[QuadratureSpec] = None) -> float:
    """u(x) = (2/omega_n) int x_n |y - x|^{-n} f(y') dy'."""
    return poisson_field(data, x, spec).value


def poisson_gradient(data: BoundaryData, x: HalfSpacePoint, spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    """grad u(x) as (d/dx_1, ..., d/dx_{n-1}, d/dx_n)."""
    return poisson_field(data, x, spec).gradient


def boundary_norm(data: BoundaryData, p: Exponent, spec: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """
    ||f||_p, exact when the data declares it, otherwise by ray quadrature.

    For p = inf without a declared norm the declared sup and inf are used.

    Raises:
        DomainError: If the norm is neither declared nor computable
            (unknown bounds for p = inf, unbounded support for finite p)
    """
    if data.norm_fn is not None:
        return QuadratureResult(float(data.norm_fn(p)), 0.0, 0)
    if p.is_infinity:
        if data.sup_value is None or data.inf_value is None:
            raise DomainError("sup norm needs declared sup and inf values", "p", p.label)
        return QuadratureResult(max(abs(data.sup_value), abs(data.inf_value)), 0.0, 0)
    if not data.bounded_support:
        raise DomainError("cannot compute a finite-p norm over unbounded support", "p", p.label)

    n = data.dim
    power = p.p
    height = data.anchor_height

    def components(theta: np.ndarray, omega: np.ndarray, f: np.ndarray) -> np.ndarray:
        c = np.cos(theta)
        jacobian = height ** (n - 1) * np.tan(theta) ** (n - 2) / (c * c)
        return (np.abs(f) ** power * jacobian)[None]

    values, errors = ray_integrals(data, np.asarray(data.center), height, components, spec)
    integral, error = float(values[0]), float(errors[0])
    if integral <= 0.0:
        return QuadratureResult(0.0, error ** (1.0 / power), 0)
    norm = integral ** (1.0 / power)
    return QuadratureResult(norm, norm * error / (power * integral), 0)


# ============================================================================
# Boundary data constructors
# ============================================================================

def _check_dim(n: int) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"dimension must be an integer >= 2, got {n}", "n", n)


def _as_center(n: int, center: Optional[Sequence[float]]) -> np.ndarray:
    if center is None:
        return np.zeros(n - 1)
    out = np.asarray(center, dtype=float)
    if out.shape != (n - 1,):
        raise DomainError(f"center needs {n - 1} coordinates", "center", tuple(out.ravel()))
    return out


def ball_breaks(center: np.ndarray, radius: float) -> BreakFunction:
    """Theta values where rays cross the sphere |y' - center| = radius."""
    center = np.array(center, dtype=float)

    def breaks(origin: np.ndarray, height: float, omega: np.ndarray) -> np.ndarray:
        d = origin - center
        b = omega @ d
        with np.errstate(invalid="ignore"):
            root = np.sqrt(b * b - d @ d + radius * radius)
        r = np.stack([-b - root, -b + root], axis=1)
        with np.errstate(invalid="ignore"):
            r = np.where(r > 0.0, r, np.nan)
        return np.arctan(r / height)

    return breaks


def _combine_breaks(*functions: BreakFunction) -> BreakFunction:
    def breaks(origin: np.ndarray, height: float, omega: np.ndarray) -> np.ndarray:
        return np.concatenate([fn(origin, height, omega) for fn in functions], axis=1)
    return breaks


def _exact_norm(amplitude: float, volume_p: Callable[[float], float]) -> Callable[[Exponent], float]:
    """Norm of amplitude * g for g with int |g|^p = volume_p(p) and sup |g| = 1."""
    def norm(p: Exponent) -> float:
        if p.is_infinity:
            return abs(amplitude)
        return abs(amplitude) * volume_p(p.p) ** (1.0 / p.p)
    return norm


def constant_data(n: int, value: float) -> BoundaryData:
    """f = value everywhere; only the sup norm is finite."""
    _check_dim(n)

    def norm(p: Exponent) -> float:
        if p.is_infinity or value == 0.0:
            return abs(value)
        raise DomainError("nonzero constant data has no finite L^p norm", "p", p.label)

    return BoundaryData(
        dim=n,
        eval_fn=lambda y: np.full(y.shape[:-1], float(value)),
        norm_fn=norm,
        center=(0.0,) * (n - 1),
        sup_value=value,
        inf_value=value,
        description=f"constant {value!r}",
    )


def ball_indicator_data(
    n: int,
    radius: float,
    value: float = 1.0,
    center: Optional[Sequence[float]] = None
) -> BoundaryData:
    """f = value on |y' - center| <= radius, 0 outside."""
    _check_dim(n)
    c = _as_center(n, center)
    volume = ball_volume(n - 1, radius)

    def eval_fn(y: np.ndarray) -> np.ndarray:
        inside = np.sum((y - c) ** 2, axis=-1) <= radius * radius
        return np.where(inside, float(value), 0.0)

    return BoundaryData(
        dim=n,
        eval_fn=eval_fn,
        norm_fn=_exact_norm(value, lambda p: volume),
        center=tuple(c),
        support_radius=radius,
        ray_breaks=ball_breaks(c, radius),
        sup_value=max(0.0, value),
        inf_value=min(0.0, value),
        description=f"{value!r} on ball radius {radius!r}",
    )


def linear_data(n: int, radius: float, axis: int = 0) -> BoundaryData:
    """f(y') = y_axis on |y'| <= radius; the norm is computed by quadrature."""
    _check_dim(n)
    if not 0 <= axis < n - 1:
        raise DomainError(f"axis must lie in [0, {n - 2}]", "axis", axis)
    c = np.zeros(n - 1)

    def eval_fn(y: np.ndarray) -> np.ndarray:
        inside = np.sum(y * y, axis=-1) <= radius * radius
        return np.where(inside, y[..., axis], 0.0)

    return BoundaryData(
        dim=n,
        eval_fn=eval_fn,
        center=tuple(c),
        support_radius=radius,
        ray_breaks=ball_breaks(c, radius),
        sup_value=radius,
        inf_value=-radius,
        description=f"y_{axis + 1} on ball radius {radius!r}",
    )


def bump_data(
    n: int,
    radius: float,
    amplitude: float = 1.0,
    power: int = 4,
    center: Optional[Sequence[float]] = None
) -> BoundaryData:
    """
    f(y') = amplitude (1 - |y' - center|^2 / radius^2)^power inside the ball, 0 outside.

    ||f||_p^p = |amplitude|^p radius^{n-1} int_{B} (1 - |y|^2)^{power p} dy, exactly.
    """
    _check_dim(n)
    if radius <= 0:
        raise DomainError("bump radius must be positive", "radius", radius)
    if power < 1:
        raise DomainError("bump power must be at least 1", "power", power)
    c = _as_center(n, center)

    def eval_fn(y: np.ndarray) -> np.ndarray:
        s = np.sum((y - c) ** 2, axis=-1) / (radius * radius)
        return np.where(s < 1.0, amplitude * np.clip(1.0 - s, 0.0, None) ** power, 0.0)

    return BoundaryData(
        dim=n,
        eval_fn=eval_fn,
        norm_fn=_exact_norm(amplitude, lambda p: radius ** (n - 1) * half_ball_moment(n, power * p)),
        center=tuple(c),
        support_radius=radius,
        anchor_height=radius,
        ray_breaks=ball_breaks(c, radius),
        sup_value=max(0.0, amplitude),
        inf_value=min(0.0, amplitude),
        description=f"bump amplitude {amplitude!r} radius {radius!r} power {power}",
    )


def _kernel_factor(x: HalfSpacePoint, direction: Direction) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """y' -> (K, cos theta) with K = n cos t sin t sin b omega_1 + (1 - n cos^2 t) cos b."""
    n, height, origin = x.dim, x.x_n, x.prime
    if direction.beta == HALF_PI:
        cb, sb = 0.0, 1.0
    else:
        cb, sb = math.cos(direction.beta), math.sin(direction.beta)

    def factor(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = y - origin
        rho2 = height * height + np.sum(d * d, axis=-1)
        kernel = n * height * d[..., 0] * sb / rho2 + (1.0 - n * height * height / rho2) * cb
        return kernel, height / np.sqrt(rho2)

    return factor


def _kernel_breaks(x: HalfSpacePoint, direction: Direction) -> BreakFunction:
    n, beta = x.dim, direction.beta
    anchor, height_x = x.prime, x.x_n

    def breaks(origin: np.ndarray, height: float, omega: np.ndarray) -> np.ndarray:
        if height != height_x or not np.array_equal(origin, anchor):
            return np.full((omega.shape[0], 1), np.nan)
        phi = np.arccos(np.clip(-omega[:, 0], -1.0, 1.0))
        return np.asarray(theta_star(phi, beta, n)).reshape(-1, 1)

    return breaks


def kernel_sign_data(
    x: HalfSpacePoint,
    direction: Direction,
    truncation_radius: float,
    amplitude: float = 1.0
) -> BoundaryData:
    """amplitude * sign of the directional gradient kernel at x, on |y' - x'| <= truncation_radius."""
    n = x.dim
    factor = _kernel_factor(x, direction)
    origin = x.prime
    radius = truncation_radius
    volume = ball_volume(n - 1, radius)

    def eval_fn(y: np.ndarray) -> np.ndarray:
        kernel, _ = factor(y)
        inside = np.sum((y - origin) ** 2, axis=-1) <= radius * radius
        return np.where(inside, amplitude * np.sign(kernel), 0.0)

    return BoundaryData(
        dim=n,
        eval_fn=eval_fn,
        norm_fn=_exact_norm(amplitude, lambda p: volume),
        center=tuple(origin),
        support_radius=radius,
        anchor_height=x.x_n,
        ray_breaks=_combine_breaks(_kernel_breaks(x, direction), ball_breaks(origin, radius)),
        sup_value=abs(amplitude),
        inf_value=-abs(amplitude),
        description=f"kernel sign beta={direction.beta!r} truncated at {radius!r}",
    )


def _kernel_power_data(x: HalfSpacePoint, direction: Direction, p: Exponent, radius: float) -> BoundaryData:
    n = x.dim
    factor = _kernel_factor(x, direction)
    origin = x.prime
    exponent = 1.0 / (p.p - 1.0)

    def eval_fn(y: np.ndarray) -> np.ndarray:
        kernel, cos_theta = factor(y)
        inside = np.sum((y - origin) ** 2, axis=-1) <= radius * radius
        value = np.sign(kernel) * (np.abs(kernel) * cos_theta ** n) ** exponent
        return np.where(inside, value, 0.0)

    return BoundaryData(
        dim=n,
        eval_fn=eval_fn,
        center=tuple(origin),
        support_radius=radius,
        anchor_height=x.x_n,
        ray_breaks=_combine_breaks(_kernel_breaks(x, direction), ball_breaks(origin, radius)),
        description=f"kernel power p={p.label} beta={direction.beta!r} truncated at {radius!r}",
    )


def extremal_data(
    p: Exponent,
    x: HalfSpacePoint,
    direction: Direction,
    truncation_radius: float,
    bump_scale: int = DEFAULT_BUMP_SCALE
) -> BoundaryData:
    """
    Boundary data that nearly attains C_p(z) for the derivative along z at x.

    p = inf: the sign of the kernel K_z, truncated to |y' - x'| <= R.
    finite p > 1: sign(K_z) |K_z|^{1/(p-1)}, truncated (scaled by x_n^{n/(p-1)}).
    p = 1: a bump of radius x_n / bump_scale at the boundary point where
    |K_z| is largest.

    Raises:
        DomainError: If truncation_radius <= 10 x_n or bump_scale < 1
    """
    if truncation_radius <= MIN_TRUNCATION_FACTOR * x.x_n:
        raise DomainError(
            f"truncation radius must exceed {MIN_TRUNCATION_FACTOR:g} x_n, got {truncation_radius!r}",
            "truncation_radius",
            truncation_radius,
        )
    if p.is_infinity:
        return kernel_sign_data(x, direction, truncation_radius)
    if p.is_finite:
        return _kernel_power_data(x, direction, p, truncation_radius)

    if bump_scale < 1:
        raise DomainError("bump_scale must be at least 1", "bump_scale", bump_scale)
    _, t, sign, _ = c1_maximizer(x.dim, direction)
    offset = np.zeros(x.dim - 1)
    if t < 1.0:
        offset[0] = -sign * x.x_n * math.sqrt(1.0 - t * t) / t
    return bump_data(
        x.dim, x.x_n / bump_scale, power=EXTREMAL_BUMP_POWER, center=x.prime + offset
    )


# ============================================================================
# Sharpness and oscillation
# ============================================================================

def _bound(n: int, p: Exponent, spec: Optional[QuadratureSpec], threads: Optional[int] = None) -> float:
    closed = closed_constant(n, p)
    if closed is not None:
        return closed
    return sup_over_direction(n, p, spec, threads).value


def _ratio_report(
    n: int,
    p: Exponent,
    x: HalfSpacePoint,
    field: FieldValue,
    norm: QuadratureResult,
    bound: float,
    direction: Optional[Direction] = None,
    direction_bound: Optional[float] = None,
    **extra
) -> SharpnessReport:
    scale = x.x_n ** p.scaling_power(n)
    gradient_norm = float(np.linalg.norm(field.gradient))
    gradient_err = float(np.linalg.norm(field.gradient_err))
    if norm.value <= 0.0:
        raise DomainError("boundary data has zero norm", "f", None)
    ratio = gradient_norm * scale / norm.value
    error = gradient_err * scale / norm.value + ratio * norm.abs_err / norm.value
    directional = None
    if direction is not None:
        directional = abs(float(field.gradient @ direction.unit_vector(n))) * scale / norm.value
    return SharpnessReport(
        n=n,
        p=p.label,
        ratio=ratio,
        bound=bound,
        gap=1.0 - ratio / bound,
        quadrature_err=error,
        directional_ratio=directional,
        direction_bound=direction_bound,
        beta=direction.beta if direction is not None else None,
        **extra,
    )


def measure_ratio(
    data: BoundaryData,
    x: HalfSpacePoint,
    p: Exponent,
    spec: Optional[QuadratureSpec] = None,
    bound: Optional[float] = None,
    direction: Optional[Direction] = None
) -> SharpnessReport:
    """|grad u(x)| x_n^{(n+p-1)/p} / ||f||_p for given data against C_p."""
    n = x.dim
    field = poisson_field(data, x, spec)
    norm = boundary_norm(data, p, spec)
    bound = bound if bound is not None else _bound(n, p, spec)
    return _ratio_report(n, p, x, field, norm, bound, direction)


def sharpness_ratio(
    p: Exponent,
    n: int,
    x: Optional[HalfSpacePoint] = None,
    direction: Optional[Direction] = None,
    truncation_radius: Optional[float] = None,
    spec: Optional[QuadratureSpec] = None,
    extrapolate: bool = False,
    bump_scale: int = DEFAULT_BUMP_SCALE
) -> SharpnessReport:
    """
    Ratio achieved by extremal_data against the sharp constant.

    With ``extrapolate`` the extremal family is evaluated once more and the
    limit is estimated: for p = inf the truncation tail decays like x_n/R,
    so 2 r(2R) - r(R) is reported; for p = 1 the bump error decays like
    m^{-2}, so (4 r(2m) - r(m))/3 is reported. Finite p is reported as is.

    Args:
        p: Exponent
        n: Dimension
        x: Evaluation point (defaults to height 1 above the origin)
        direction: Direction whose extremal data is used (defaults to e_n)
        truncation_radius: Support radius of the data (defaults to 1000 x_n)
        spec: Accuracy parameters
        extrapolate: Also estimate the limit of the extremal family
        bump_scale: m for the p = 1 bump of radius x_n/m

    Returns:
        SharpnessReport with ratio, directional ratio, C_p and C_p(beta)
    """
    _check_dim(n)
    x = x or HalfSpacePoint.above_origin(n)
    if x.dim != n:
        raise DomainError(f"x is {x.dim}-dimensional, expected {n}", "x", x.dim)
    direction = direction or Direction.normal()
    radius = truncation_radius if truncation_radius is not None else DEFAULT_TRUNCATION_FACTOR * x.x_n
    bound = _bound(n, p, spec)
    direction_bound = cp_direction(n, p, direction, spec).value

    def run(radius_: float, scale_: int) -> SharpnessReport:
        data = extremal_data(p, x, direction, radius_, scale_)
        field = poisson_field(data, x, spec)
        norm = boundary_norm(data, p, spec)
        return _ratio_report(
            n, p, x, field, norm, bound, direction, direction_bound, truncation_radius=radius_
        )

    report = run(radius, bump_scale)
    logger.info(f"sharpness n={n} p={p.label}: ratio {report.ratio!r} of bound {bound!r}")
    if not extrapolate or p.is_finite:
        return report
    if p.is_infinity:
        finer = run(2.0 * radius, bump_scale)
        limit = 2.0 * finer.ratio - report.ratio
    else:
        finer = run(radius, 2 * bump_scale)
        limit = (4.0 * finer.ratio - report.ratio) / 3.0
    return report.model_copy(update={"extrapolated_ratio": limit})


def oscillation_check(
    data: BoundaryData,
    x: HalfSpacePoint,
    spec: Optional[QuadratureSpec] = None,
    tolerance: float = 1e-3
) -> OscillationReport:
    """
    Check |grad u(x)| <= (C_inf/2) osc(f) / x_n.

    For a Poisson integral, sup u - inf u over the half-space equals
    sup f - inf f, so the declared bounds of the data give osc(u).

    Raises:
        DomainError: If the data does not declare its sup and inf
    """
    oscillation = data.oscillation
    if oscillation is None:
        raise DomainError("oscillation check needs declared sup and inf values", "f", data.description)
    n = x.dim
    field = poisson_field(data, x, spec)
    gradient_norm = float(np.linalg.norm(field.gradient))
    error = float(np.linalg.norm(field.gradient_err))
    bound = oscillation_constant(n) * oscillation / x.x_n
    return OscillationReport(
        n=n,
        gradient_norm=gradient_norm,
        bound=bound,
        oscillation=oscillation,
        quadrature_err=error,
        holds=gradient_norm <= bound * (1.0 + tolerance) + error,
    )


# ============================================================================
# Randomized verification
# ============================================================================

def random_point(n: int, rng: np.random.Generator) -> HalfSpacePoint:
    """x' standard normal, x_n uniform on [0.5, 2]."""
    return HalfSpacePoint(
        x_prime=tuple(float(c) for c in rng.normal(size=n - 1)), x_n=float(rng.uniform(0.5, 2.0))
    )


def random_boundary_data(n: int, x: HalfSpacePoint, rng: np.random.Generator) -> BoundaryData:
    """
    Random data with ||f||_inf = 1 whose rays from x' have known breaks.

    Either a signed bump of radius in [0.5, 3] x_n whose center lies within
    0.9 radius of x', or +-sign(K_z) for beta in [0, 1.2] on a ball around x'
    of radius in [2, 20] x_n, enlarged so that the zero set of K_z stays
    inside the support.
    """
    amplitude = float(rng.choice([-1.0, 1.0]))
    if rng.integers(2) == 0:
        radius = x.x_n * float(rng.uniform(0.5, 3.0))
        heading = rng.normal(size=n - 1)
        heading /= np.linalg.norm(heading)
        center = x.prime + heading * radius * float(rng.uniform(0.0, 0.9))
        return bump_data(n, radius, amplitude, int(rng.integers(2, 5)), center)
    beta = float(rng.uniform(0.0, MAX_RANDOM_BETA))
    reach = math.tan(theta_star(0.0, beta, n))
    radius = x.x_n * max(float(rng.uniform(2.0, 20.0)), 2.0 * reach)
    return kernel_sign_data(x, Direction(beta=beta), radius, amplitude)


def verify_random(
    n: int,
    samples: int,
    seed: int,
    exponents: Sequence[Exponent],
    spec: Optional[QuadratureSpec] = None,
    threads: Optional[int] = None
) -> list[SharpnessReport]:
    """
    Ratios of random boundary data against C_p, one report per (sample, p).

    Sample i draws from numpy's PCG64 generator seeded with (seed, i), so
    results do not depend on the number of threads. The gradient is computed
    once per sample and shared by every exponent. Sample integrals use
    tolerances no tighter than RANDOM_REL_TOL and RANDOM_ABS_TOL; the bounds
    use ``spec`` as given.
    """
    _check_dim(n)
    if samples < 1:
        raise DomainError(f"samples must be at least 1, got {samples}", "samples", samples)
    bounds = {p.label: _bound(n, p, spec, threads) for p in exponents}
    base = spec or DEFAULT_SPEC
    sample_spec = base.model_copy(
        update={"rel_tol": max(base.rel_tol, RANDOM_REL_TOL), "abs_tol": max(base.abs_tol, RANDOM_ABS_TOL)}
    )

    def run(sample: int) -> list[SharpnessReport]:
        rng = np.random.default_rng([seed, sample])
        x = random_point(n, rng)
        data = random_boundary_data(n, x, rng)
        field = poisson_field(data, x, sample_spec)
        return [
            _ratio_report(
                n, p, x, field, boundary_norm(data, p, sample_spec), bounds[p.label], seed=seed, sample=sample
            )
            for p in exponents
        ]

    reports = [r for batch in parallel_map(run, list(range(samples)), threads) for r in batch]
    worst = max(r.ratio_over_bound for r in reports)
    logger.info(f"random verification n={n}: {samples} samples, max ratio/bound {worst!r}")
    return reports
