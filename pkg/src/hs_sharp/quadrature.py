"""Deterministic Gauss-Legendre quadrature.

``integrate_1d`` bisects panels adaptively: a panel is accepted once the
difference between its one-panel and two-half-panel estimates is within its
width-proportional share of the tolerance. ``integrate_2d_split`` integrates
over a rectangle in (phi, theta), splitting every inner theta-integral at a
kink curve theta*(phi) so each piece is smooth. Inner integrals, and
``integrate_graded``, use the tanh-sinh map so that fractional powers at the
piece ends cost no extra refinement.

Integrands are called with numpy arrays and must broadcast; every reduction
runs in a fixed order, so results are bit-reproducible for a given spec.
"""
import logging
import math
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np

from .schemas import QuadratureSpec
from .special_fn import DomainError

logger = logging.getLogger("hs-sharp.quadrature")

DEFAULT_SPEC = QuadratureSpec()

# Differences below this multiple of eps * integral(|f|) are rounding noise.
ROUNDING_FACTOR = 64.0 * np.finfo(float).eps

Integrand1D = Callable[[np.ndarray], np.ndarray]
Integrand2D = Callable[[np.ndarray, np.ndarray], np.ndarray]
KinkCurve = Callable[[np.ndarray], np.ndarray]

# Inner integrals run over s in [-GRADING_HALF_WIDTH, GRADING_HALF_WIDTH] after the
# tanh-sinh map; the mass cut off at each end is below width * exp(-51).
GRADING_HALF_WIDTH = 3.5
HALF_PI = 0.5 * math.pi


class NonConvergenceError(RuntimeError):
    """Raised when the refinement budget runs out before the tolerance is met."""

    def __init__(
        self,
        message: str,
        best_estimate: float,
        error_estimate: float,
        refinements: int
    ):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
        self.refinements = refinements


class QuadratureResult(NamedTuple):
    value: float
    abs_err: float
    evaluations: int


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1] (read-only, cached)."""
    if order < 2:
        raise DomainError(f"Gauss-Legendre order must be >= 2, got {order}", "order", order)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _checked(values, shape: tuple[int, ...]) -> np.ndarray:
    out = np.asarray(values, dtype=float)
    if out.shape != shape:
        out = np.broadcast_to(out, shape)
    if not np.all(np.isfinite(out)):
        raise DomainError("integrand is not finite on the integration range", "f", None)
    return out


def _panel_estimates(
    f: Integrand1D,
    lo: np.ndarray,
    hi: np.ndarray,
    nodes: np.ndarray,
    weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One Gauss-Legendre panel per (lo, hi) pair; returns integrals and integrals of |f|."""
    half = 0.5 * (hi - lo)
    x = (0.5 * (hi + lo))[:, None] + half[:, None] * nodes[None, :]
    fx = _checked(f(x.ravel()), (x.size,)).reshape(x.shape)
    values = (fx @ weights) * half
    magnitudes = (np.abs(fx) @ weights) * np.abs(half)
    return values, magnitudes


def integrate_1d(
    f: Integrand1D,
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None
) -> QuadratureResult:
    """
    Integrate a vectorized function over [a, b].

    Args:
        f: Function accepting a 1D array of nodes and returning their values
        a: Lower limit
        b: Upper limit, b >= a
        spec: Accuracy parameters (defaults to QuadratureSpec())

    Returns:
        QuadratureResult with the value, the sum of accepted panel
        differences as error estimate and the number of evaluations

    Raises:
        DomainError: If a > b or f is not finite at a node
        NonConvergenceError: If panels remain unaccepted after
            spec.max_refinements bisection levels
    """
    spec = spec or DEFAULT_SPEC
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite", "range", (a, b))
    if a > b:
        raise DomainError(f"need a <= b, got [{a}, {b}]", "range", (a, b))
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)

    nodes, weights = gauss_legendre(spec.base_order)
    length = b - a
    lo = np.array([a])
    hi = np.array([b])
    coarse, _ = _panel_estimates(f, lo, hi, nodes, weights)
    evaluations = spec.base_order

    accepted_value = 0.0
    accepted_err = 0.0
    for level in range(spec.max_refinements + 1):
        mid = 0.5 * (lo + hi)
        left, left_mag = _panel_estimates(f, lo, mid, nodes, weights)
        right, right_mag = _panel_estimates(f, mid, hi, nodes, weights)
        evaluations += 2 * lo.size * spec.base_order

        fine = left + right
        diff = np.abs(fine - coarse)
        floor = ROUNDING_FACTOR * (left_mag + right_mag)
        total = accepted_value + float(fine.sum())
        share = spec.tolerance(total) * (hi - lo) / length
        done = diff <= np.maximum(share, floor)

        accepted_value += float(fine[done].sum())
        accepted_err += float(np.maximum(diff, floor)[done].sum())
        if done.all():
            logger.debug(f"integrate_1d converged at level {level} with {evaluations} evaluations")
            return QuadratureResult(accepted_value, accepted_err, evaluations)

        keep = ~done
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
        coarse = np.concatenate([left[keep], right[keep]])

    best = accepted_value + float(coarse.sum())
    error = accepted_err + float(diff[~done].sum())
    raise NonConvergenceError(
        f"integrate_1d on [{a}, {b}] not converged after {spec.max_refinements} refinements "
        f"(estimate {best!r}, error {error!r})",
        best_estimate=best,
        error_estimate=error,
        refinements=spec.max_refinements,
    )


def tanh_sinh_map(lo: np.ndarray, hi: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Points and Jacobian of theta = lo + (hi - lo) (1 + tanh(pi/2 sinh s)) / 2.

    The Jacobian decays double exponentially at both ends, which absorbs
    algebraic endpoint behaviour such as cos^a(theta) at theta = pi/2 or
    |A|^q at a kink. Distances to the nearer end are computed directly so
    points close to hi do not lose precision.
    """
    width = hi - lo
    tail = np.exp(-2.0 * HALF_PI * np.sinh(np.abs(s)))
    near = width * tail / (1.0 + tail)
    theta = np.where(s < 0.0, lo + near, hi - near)
    jacobian = width * 2.0 * HALF_PI * np.cosh(s) * tail / (1.0 + tail) ** 2
    return theta, jacobian


def integrate_graded(
    f: Integrand1D,
    a: float,
    b: float,
    spec: Optional[QuadratureSpec] = None
) -> QuadratureResult:
    """
    integrate_1d after the tanh-sinh map of [a, b] onto the s-axis.

    For f with an integrable algebraic singularity or a fractional power
    vanishing at an end of [a, b].
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite", "range", (a, b))
    if a > b:
        raise DomainError(f"need a <= b, got [{a}, {b}]", "range", (a, b))
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)

    def mapped(s: np.ndarray) -> np.ndarray:
        theta, jacobian = tanh_sinh_map(a, b, s)
        return _checked(f(theta), theta.shape) * jacobian

    return integrate_1d(mapped, -GRADING_HALF_WIDTH, GRADING_HALF_WIDTH, spec)


def _uniform_panels(
    f: Integrand2D,
    phi: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    panels: int,
    nodes: np.ndarray,
    weights: np.ndarray,
    graded: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate f(phi_j, .) over [lo_j, hi_j] with ``panels`` equal panels for every j.

    With ``graded`` the panels are equal in the tanh-sinh variable s instead.
    """
    if graded:
        s_lo = np.full(lo.shape, -GRADING_HALF_WIDTH)
        s_hi = np.full(lo.shape, GRADING_HALF_WIDTH)
    else:
        s_lo, s_hi = lo, hi
    h = (s_hi - s_lo) / panels
    starts = s_lo[:, None] + h[:, None] * np.arange(panels)[None, :]
    s = starts[:, :, None] + (0.5 * h)[:, None, None] * (nodes + 1.0)[None, None, :]
    if graded:
        theta, jacobian = tanh_sinh_map(lo[:, None, None], hi[:, None, None], s)
        fx = _checked(f(phi[:, None, None], theta), s.shape) * jacobian
    else:
        fx = _checked(f(phi[:, None, None], s), s.shape)
    values = (fx @ weights).sum(axis=1) * 0.5 * h
    magnitudes = (np.abs(fx) @ weights).sum(axis=1) * 0.5 * np.abs(h)
    return values, magnitudes


def integrate_inner(
    f: Integrand2D,
    phi: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    spec: Optional[QuadratureSpec] = None,
    graded: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """
    Inner integrals over [lo_j, hi_j] for every outer node phi_j at once.

    Each node's panel count doubles until its two-level difference meets the
    tolerance. Empty intervals integrate to zero. With ``graded`` (the
    default) the panels are laid out in the tanh-sinh variable, so integrable
    algebraic endpoint singularities converge as fast as smooth integrands.

    Returns:
        (values, error estimates), one entry per node

    Raises:
        NonConvergenceError: If some node is unconverged after
            spec.max_refinements doublings
    """
    spec = spec or DEFAULT_SPEC
    nodes, weights = gauss_legendre(spec.base_order)
    values = np.zeros(phi.shape)
    errors = np.zeros(phi.shape)

    active = np.flatnonzero(hi > lo)
    if active.size == 0:
        return values, errors
    coarse, _ = _uniform_panels(f, phi[active], lo[active], hi[active], 1, nodes, weights, graded)
    panels = 1
    for _ in range(spec.max_refinements + 1):
        panels *= 2
        fine, magnitudes = _uniform_panels(f, phi[active], lo[active], hi[active], panels, nodes, weights, graded)
        diff = np.abs(fine - coarse)
        floor = ROUNDING_FACTOR * magnitudes
        tol = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(fine))
        done = diff <= np.maximum(tol, floor)
        values[active[done]] = fine[done]
        errors[active[done]] = np.maximum(diff, floor)[done]
        active = active[~done]
        coarse = fine[~done]
        if active.size == 0:
            return values, errors

    worst = float(diff[~done].max())
    raise NonConvergenceError(
        f"inner integral not converged for {active.size} outer nodes (worst difference {worst!r})",
        best_estimate=float(values.sum() + coarse.sum()),
        error_estimate=worst,
        refinements=spec.max_refinements,
    )


def integrate_2d_split(
    f: Integrand2D,
    phi_range: tuple[float, float],
    theta_range: tuple[float, float],
    kink: Optional[KinkCurve] = None,
    spec: Optional[QuadratureSpec] = None,
    graded: bool = True
) -> QuadratureResult:
    """
    Integrate f(phi, theta) over a rectangle, splitting the inner integral at a kink.

    Args:
        f: Function of broadcastable arrays (phi, theta)
        phi_range: Outer range (phi_lo, phi_hi)
        theta_range: Inner range (theta_lo, theta_hi)
        kink: Optional curve phi -> theta*(phi); values are clipped to the
            inner range and NaN means "no kink at this phi"
        spec: Accuracy parameters
        graded: Lay inner panels out in the tanh-sinh variable

    Returns:
        QuadratureResult; the error is the root-sum-square of the outer
        error and the worst inner error times the outer length

    Raises:
        DomainError: For empty or reversed ranges
        NonConvergenceError: As integrate_1d
    """
    spec = spec or DEFAULT_SPEC
    phi_lo, phi_hi = phi_range
    theta_lo, theta_hi = theta_range
    if not (phi_lo < phi_hi and theta_lo < theta_hi):
        raise DomainError("integration ranges must be nonempty", "range", (phi_range, theta_range))

    worst_inner = [0.0]
    calls = [0]

    def outer(phi: np.ndarray) -> np.ndarray:
        lo = np.full(phi.shape, float(theta_lo))
        hi = np.full(phi.shape, float(theta_hi))
        if kink is None:
            values, errors = integrate_inner(f, phi, lo, hi, spec, graded)
        else:
            split = np.asarray(kink(phi), dtype=float)
            split = np.where(np.isnan(split), theta_lo, np.clip(split, theta_lo, theta_hi))
            below, below_err = integrate_inner(f, phi, lo, split, spec, graded)
            above, above_err = integrate_inner(f, phi, split, hi, spec, graded)
            values, errors = below + above, below_err + above_err
        worst_inner[0] = max(worst_inner[0], float(errors.max()))
        calls[0] += phi.size
        return values

    result = integrate_1d(outer, phi_lo, phi_hi, spec)
    error = math.hypot(result.abs_err, worst_inner[0] * (phi_hi - phi_lo))
    return QuadratureResult(result.value, error, calls[0])
