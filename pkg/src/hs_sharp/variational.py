"""Direction-resolved sharp constants and their suprema.

A test direction z is described by its polar angle beta from e_n. For a fixed
beta the constant C_p(z) is computed by one of several routes:

- p = 1: a scalar maximization over t = (e_sigma, e_n) in [0, 1];
- hemisphere route: the hemisphere integral in coordinates (azimuth, t);
- double-integral route: the (phi, theta) integral with the inner integral
  split along the kink curve theta*(phi) where the affine expression
  A(phi, theta) = (n cos^2 theta - 1) cos beta + n cos theta sin theta cos phi sin beta
  changes sign;
- alpha route (p = inf): the smooth phi-integral of P_n, written in beta so
  the tangential direction is regular.

All formulas carry cos beta and sin beta polynomially, never tan beta.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, NamedTuple, Optional, Sequence, TypeVar

import numpy as np

from .config import resolve_threads
from .constants_closed import p_n
from .models import Direction, Exponent, Method
from .quadrature import DEFAULT_SPEC, integrate_1d, integrate_2d_split, integrate_graded
from .schemas import ConstantResult, QuadratureSpec
from .special_fn import DomainError, sphere_area

logger = logging.getLogger("hs-sharp.variational")

HALF_PI = 0.5 * math.pi
INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# Below this p the double-integral integrand is too concentrated; p = 1 route is used instead.
NEAR_ONE_EXPONENT = 1.1

BETA_GRID_SIZE = 65
BETA_TOLERANCE = 1e-10
T_GRID = np.linspace(0.0, 1.0, 1025)
T_TOLERANCE = 1e-13

T = TypeVar("T")
R = TypeVar("R")


class GoldenResult(NamedTuple):
    x: float
    value: float
    spread: float
    evaluations: int


def _cos_sin(beta: float) -> tuple[float, float]:
    """cos and sin of beta, exact at the ends of [0, pi/2]."""
    if beta == 0.0:
        return 1.0, 0.0
    if beta == HALF_PI:
        return 0.0, 1.0
    return math.cos(beta), math.sin(beta)


def _check_dim(n: int, minimum: int = 2) -> None:
    if int(n) != n or n < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {n}", "n", n)


def parallel_map(fn: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> list[R]:
    """Map in input order, using a thread pool when more than one worker is allowed."""
    workers = resolve_threads(threads)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def golden_section_max(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    max_iterations: int = 200
) -> GoldenResult:
    """
    Maximize a unimodal function on [a, b] by golden-section search.

    Args:
        f: Objective
        a: Left end of the bracket
        b: Right end of the bracket
        tol: Stop once the bracket is narrower than this

    Returns:
        GoldenResult with the best interior point, its value, the spread
        |f(c) - f(d)| of the last two interior values and the number of calls
    """
    if a > b:
        a, b = b, a
    c = b - INV_GOLDEN * (b - a)
    d = a + INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    calls = 2
    while b - a > tol and calls < max_iterations:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_GOLDEN * (b - a)
            fd = f(d)
        calls += 1
    if fc >= fd:
        return GoldenResult(c, fc, abs(fc - fd), calls)
    return GoldenResult(d, fd, abs(fc - fd), calls)


# ============================================================================
# Kink curve
# ============================================================================

def affine_expression(phi, theta, beta: float, n: int):
    """A(phi, theta) = (n cos^2 theta - 1) cos beta + n cos theta sin theta cos phi sin beta."""
    cb, sb = _cos_sin(beta)
    ct = np.cos(theta)
    return (n * ct * ct - 1.0) * cb + n * ct * np.sin(theta) * np.cos(phi) * sb


def theta_star(phi, beta: float, n: int):
    """
    Root in [0, pi/2] of A(phi, theta) = 0.

    With g = n sin(beta) cos(phi) the root is
    arctan((g + sqrt(4(n-1) cos^2 beta + g^2)) / (2 cos beta)); for g < 0 the
    equivalent form arctan(2(n-1) cos beta / (sqrt(...) - g)) is used so that
    nothing cancels and nothing is infinite at beta = pi/2.

    Args:
        phi: Azimuth in [0, pi], scalar or array
        beta: Polar angle of the direction in [0, pi/2]
        n: Dimension

    Returns:
        theta*(phi), same shape as phi

    Raises:
        DomainError: For arguments out of range or a degenerate root
    """
    _check_dim(n)
    phi_arr = np.asarray(phi, dtype=float)
    if not (0.0 <= beta <= HALF_PI):
        raise DomainError(f"beta must lie in [0, pi/2], got {beta}", "beta", beta)
    if np.any(phi_arr < 0.0) or np.any(phi_arr > math.pi):
        raise DomainError("phi must lie in [0, pi]", "phi", phi)

    cb, sb = _cos_sin(beta)
    g = n * sb * np.cos(phi_arr)
    root = np.sqrt(4.0 * (n - 1) * cb * cb + g * g)
    with np.errstate(invalid="ignore", divide="ignore"):
        upper = np.arctan2(g + root, 2.0 * cb)
        lower = np.arctan2(2.0 * (n - 1) * cb, root - g)
    theta = np.where(g >= 0.0, upper, lower)
    if not np.all(np.isfinite(theta)):
        raise DomainError("affine expression has no zero in [0, pi/2]", "beta", beta)
    return float(theta) if theta.ndim == 0 else theta


# ============================================================================
# p = 1
# ============================================================================

def _c1_branch(t: np.ndarray, n: int, cb: float, sb: float, sign: float) -> np.ndarray:
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    return np.abs(cb * (1.0 - n * t * t) - sign * n * t * s * sb) * t ** n


def c1_maximizer(n: int, direction: Direction) -> tuple[float, float, float, float]:
    """
    Maximize |cos b (1 - n t^2) - sign n t sqrt(1-t^2) sin b| t^n over t in [0, 1] and sign.

    ``sign`` is the cosine of the azimuth between sigma' and z'.

    Returns:
        (maximum, maximizing t, maximizing sign, golden spread)
    """
    _check_dim(n)
    cb, sb = _cos_sin(direction.beta)
    best = (-1.0, 0.0, 1.0, 0.0)
    for sign in (1.0, -1.0):
        values = _c1_branch(T_GRID, n, cb, sb, sign)
        i = int(np.argmax(values))
        candidate = (float(values[i]), float(T_GRID[i]), sign, 0.0)
        lo = T_GRID[max(i - 1, 0)]
        hi = T_GRID[min(i + 1, T_GRID.size - 1)]
        polished = golden_section_max(
            lambda t: float(_c1_branch(np.array(t), n, cb, sb, sign)), lo, hi, T_TOLERANCE
        )
        if polished.value > candidate[0]:
            candidate = (polished.value, polished.x, sign, polished.spread)
        if candidate[0] > best[0]:
            best = candidate
        if sb == 0.0:
            break  # both signs coincide
    return best


def c1_direction(n: int, direction: Direction) -> float:
    """
    C_1(z) = (2/omega_n) sup over the hemisphere, reduced to t and the azimuth sign.

    Args:
        n: Dimension, n >= 2
        direction: Test direction

    Returns:
        C_1(z)
    """
    maximum, _, _, _ = c1_maximizer(n, direction)
    return 2.0 / sphere_area(n) * maximum


def _c1_result(n: int, direction: Direction) -> ConstantResult:
    maximum, t, _, spread = c1_maximizer(n, direction)
    value = 2.0 / sphere_area(n) * maximum
    return ConstantResult(
        value=value,
        abs_err=max(2.0 / sphere_area(n) * spread, 4.0 * np.finfo(float).eps * value),
        argmax_param=t,
        argmax_beta=direction.beta,
        method=Method.HEMISPHERE_SUP,
    )


# ============================================================================
# Integral routes for 1 < p <= inf
# ============================================================================

def _power_result(prefactor: float, integral: float, integral_err: float, q: float) -> tuple[float, float]:
    """value = prefactor * integral^{1/q} and its propagated error."""
    value = prefactor * integral ** (1.0 / q)
    return value, value * integral_err / (q * integral)


def _half_circle(n: int, q: float, beta: float, spec: QuadratureSpec) -> tuple[float, float]:
    """Hemisphere integral for n = 2, where the hemisphere is a half circle."""
    weight_power = 2.0 * (q - 1.0)

    def integrand(angle: np.ndarray) -> np.ndarray:
        return np.abs(np.cos(2.0 * angle - beta)) ** q * np.cos(angle) ** weight_power

    # |cos(2 angle - beta)| changes sign at (beta -+ pi/2)/2
    edges = (-HALF_PI, 0.5 * (beta - HALF_PI), 0.5 * (beta + HALF_PI), HALF_PI)
    total, error = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        piece = integrate_graded(integrand, lo, hi, spec)
        total += piece.value
        error += piece.abs_err
    return _power_result(2.0 / sphere_area(2), total, error, q)


def cp_direction_hemisphere(
    n: int,
    p: Exponent,
    direction: Direction,
    spec: Optional[QuadratureSpec] = None
) -> ConstantResult:
    """
    C_p(z) from the hemisphere integral, 1 < p <= inf.

    For n >= 3 the hemisphere point is written through t = (e_sigma, e_n) and
    the azimuth psi of sigma' relative to z', with measure
    omega_{n-2} (1-t^2)^{(n-3)/2} sin^{n-3}psi. The substitution t = 1 - u^2
    absorbs the (1-t^2)^{(n-3)/2} endpoint behaviour, and the u-integral is
    split where the kernel changes sign. For n = 2 a single angle is used.

    Raises:
        DomainError: For p = 1 (use c1_direction) or n < 2
        NonConvergenceError: From the quadrature
    """
    _check_dim(n)
    if p.is_one:
        raise DomainError("the hemisphere integral needs p > 1; use c1_direction", "p", p.label)
    spec = spec or DEFAULT_SPEC
    q = p.conjugate
    beta = direction.beta

    if n == 2:
        value, error = _half_circle(n, q, beta, spec)
        return ConstantResult(
            value=value, abs_err=error, argmax_beta=beta, method=Method.HEMISPHERE_QUADRATURE
        )

    cb, sb = _cos_sin(beta)
    weight_power = n * (q - 1.0)

    def integrand(psi: np.ndarray, u: np.ndarray) -> np.ndarray:
        t = 1.0 - u * u
        rest = 2.0 - u * u
        s = u * np.sqrt(rest)
        a = cb * (1.0 - n * t * t) - n * t * s * sb * np.cos(psi)
        measure = 2.0 * u ** (n - 2) * rest ** (0.5 * (n - 3)) * np.sin(psi) ** (n - 3)
        return np.abs(a) ** q * t ** weight_power * measure

    def kink(psi: np.ndarray) -> np.ndarray:
        return np.sqrt(1.0 - np.cos(theta_star(psi, beta, n)))

    integral = integrate_2d_split(integrand, (0.0, math.pi), (0.0, 1.0), kink, spec)
    value, error = _power_result(
        2.0 / sphere_area(n), sphere_area(n - 2) * integral.value, sphere_area(n - 2) * integral.abs_err, q
    )
    logger.debug(f"hemisphere n={n} p={p.label} beta={beta!r}: {value!r} +- {error:.2e}")
    return ConstantResult(value=value, abs_err=error, argmax_beta=beta, method=Method.HEMISPHERE_QUADRATURE)


def cp_direction_double_integral(
    n: int,
    p: Exponent,
    direction: Direction,
    spec: Optional[QuadratureSpec] = None
) -> ConstantResult:
    """
    C_p(z) from the (phi, theta) double integral, finite p > 1, n >= 3.

    C_p(z) = (2/omega_n) (omega_{n-2} J)^{(p-1)/p} with
    J = int int |A|^{p/(p-1)} cos^{n/(p-1)}theta sin^{n-2}theta sin^{n-3}phi dtheta dphi,
    which is the gamma-parameterized form with (1+gamma^2)^{-1/2} moved inside.
    For p < 1.1 the p = 1 route is returned instead, with a warning.

    Raises:
        DomainError: For n < 3 or a non-finite exponent
        NonConvergenceError: From the quadrature
    """
    _check_dim(n, minimum=3)
    if not p.is_finite:
        raise DomainError("the double-integral route needs a finite p > 1", "p", p.label)
    if p.p < NEAR_ONE_EXPONENT:
        logger.warning(
            f"p={p.label} is below {NEAR_ONE_EXPONENT}; using the p=1 hemisphere supremum instead"
        )
        return _c1_result(n, direction)

    spec = spec or DEFAULT_SPEC
    q = p.conjugate
    beta = direction.beta
    cb, sb = _cos_sin(beta)
    weight_power = n * (q - 1.0)

    def integrand(phi: np.ndarray, theta: np.ndarray) -> np.ndarray:
        ct, st = np.cos(theta), np.sin(theta)
        a = (n * ct * ct - 1.0) * cb + n * ct * st * np.cos(phi) * sb
        return np.abs(a) ** q * ct ** weight_power * st ** (n - 2) * np.sin(phi) ** (n - 3)

    integral = integrate_2d_split(
        integrand, (0.0, math.pi), (0.0, HALF_PI), lambda phi: theta_star(phi, beta, n), spec
    )
    value, error = _power_result(
        2.0 / sphere_area(n), sphere_area(n - 2) * integral.value, sphere_area(n - 2) * integral.abs_err, q
    )
    logger.debug(f"double integral n={n} p={p.label} beta={beta!r}: {value!r} +- {error:.2e}")
    return ConstantResult(value=value, abs_err=error, argmax_beta=beta, method=Method.DOUBLE_INTEGRAL)


def _alpha_prefactor(n: int) -> float:
    return 4.0 * sphere_area(n - 2) * (n - 1) ** (0.5 * (n - 1)) / sphere_area(n)


def cinf_alpha_integral(n: int, alpha: float, spec: Optional[QuadratureSpec] = None) -> float:
    """
    The alpha-parameterized C_inf integrand value.

    4 omega_{n-2} (n-1)^{(n-1)/2} / (omega_n sqrt(n^2 + 4(n-1) alpha^2))
    * int_0^pi P_n(alpha cos phi) sin^{n-3}phi dphi

    Args:
        n: Dimension, n >= 3
        alpha: Direction parameter alpha = n gamma / (2 sqrt(n-1)) >= 0
        spec: Accuracy parameters

    Returns:
        The value for this alpha; its supremum over alpha is C_inf
    """
    _check_dim(n, minimum=3)
    if not (alpha >= 0.0) or not math.isfinite(alpha):
        raise DomainError(f"alpha must be a finite nonnegative number, got {alpha}", "alpha", alpha)
    integral = integrate_1d(
        lambda phi: p_n(alpha * np.cos(phi), n) * np.sin(phi) ** (n - 3), 0.0, math.pi, spec
    )
    return _alpha_prefactor(n) / math.sqrt(n * n + 4.0 * (n - 1) * alpha * alpha) * integral.value


def cinf_direction(n: int, direction: Direction, spec: Optional[QuadratureSpec] = None) -> ConstantResult:
    """
    C_inf(z) by the alpha route rewritten in beta, n >= 3.

    cos(beta) P_n(alpha cos phi) equals s (s^2 / (cos^2 beta + (n-1) s^2))^{(n-2)/2}
    with s = y + sqrt(cos^2 beta + y^2), y = n sin(beta) cos(phi) / (2 sqrt(n-1)),
    which stays finite at beta = pi/2.
    """
    _check_dim(n, minimum=3)
    beta = direction.beta
    cb, sb = _cos_sin(beta)
    scale = n * sb / (2.0 * math.sqrt(n - 1))
    cb2 = cb * cb

    def integrand(phi: np.ndarray) -> np.ndarray:
        y = scale * np.cos(phi)
        root = np.sqrt(cb2 + y * y)
        with np.errstate(invalid="ignore", divide="ignore"):
            s = np.where(y >= 0.0, y + root, cb2 / (root - y))
            denominator = cb2 + (n - 1) * s * s
            ratio = np.where(denominator > 0.0, s * s / denominator, 0.0)
        return s * ratio ** (0.5 * (n - 2)) * np.sin(phi) ** (n - 3)

    integral = integrate_1d(integrand, 0.0, math.pi, spec or DEFAULT_SPEC)
    prefactor = _alpha_prefactor(n) / n
    return ConstantResult(
        value=prefactor * integral.value,
        abs_err=prefactor * integral.abs_err,
        argmax_param=direction.alpha(n),
        argmax_beta=beta,
        method=Method.ALPHA_INTEGRAL,
    )


def cp_direction(
    n: int,
    p: Exponent,
    direction: Direction,
    spec: Optional[QuadratureSpec] = None
) -> ConstantResult:
    """
    C_p(z) by the preferred route for (n, p).

    p = 1 uses the scalar maximization, n = 2 the half-circle integral,
    p = inf the alpha route and finite p the double integral.
    """
    _check_dim(n)
    if p.is_one:
        return _c1_result(n, direction)
    if n == 2:
        return cp_direction_hemisphere(n, p, direction, spec)
    if p.is_infinity:
        return cinf_direction(n, direction, spec)
    return cp_direction_double_integral(n, p, direction, spec)


def normal_derivative_constant(n: int, p: Exponent, spec: Optional[QuadratureSpec] = None) -> ConstantResult:
    """Sharp constant for |du/dx_n|, i.e. C_p(e_n)."""
    return cp_direction(n, p, Direction.normal(), spec)


# ============================================================================
# Profiles and suprema
# ============================================================================

def direction_profile(
    n: int,
    p: Exponent,
    beta_count: int = 33,
    spec: Optional[QuadratureSpec] = None,
    threads: Optional[int] = None
) -> list[ConstantResult]:
    """C_p(beta) on beta_count uniform angles in [0, pi/2], increasing beta."""
    if beta_count < 2:
        raise DomainError(f"beta_count must be >= 2, got {beta_count}", "beta_count", beta_count)
    betas = [float(b) for b in np.linspace(0.0, HALF_PI, beta_count)]
    return parallel_map(lambda b: cp_direction(n, p, Direction(beta=b), spec), betas, threads)


def _sup_method(n: int, p: Exponent) -> Method:
    if p.is_one or n == 2:
        return Method.DIRECTION_SCAN
    if p.is_infinity:
        return Method.ALPHA_SUP
    if p.p < NEAR_ONE_EXPONENT:
        return Method.DIRECTION_SCAN
    return Method.GAMMA_SUP


def sup_over_direction(
    n: int,
    p: Exponent,
    spec: Optional[QuadratureSpec] = None,
    threads: Optional[int] = None
) -> ConstantResult:
    """
    C_p = sup over directions of C_p(z).

    A uniform grid of 65 angles in [0, pi/2] is followed by a golden-section
    search on the cell around the best grid value, down to width 1e-10. Among
    values equal within their error estimates the smallest beta wins.

    Args:
        n: Dimension, n >= 2
        p: Exponent
        spec: Accuracy parameters
        threads: Worker count for the grid (defaults to HS_SHARP_THREADS)

    Returns:
        ConstantResult with the supremum, argmax beta (argmax_param is alpha
        for p = inf, beta otherwise) and error = quadrature error of the
        chosen value + golden-section spread
    """
    _check_dim(n)
    spec = spec or DEFAULT_SPEC
    evaluated: dict[float, ConstantResult] = {}

    def evaluate(beta: float) -> ConstantResult:
        if beta not in evaluated:
            evaluated[beta] = cp_direction(n, p, Direction(beta=beta), spec)
        return evaluated[beta]

    grid = [float(b) for b in np.linspace(0.0, HALF_PI, BETA_GRID_SIZE)]
    for beta, result in zip(grid, parallel_map(lambda b: cp_direction(n, p, Direction(beta=b), spec), grid, threads)):
        evaluated[beta] = result

    best_index = max(range(len(grid)), key=lambda i: evaluated[grid[i]].value)
    lo = grid[max(best_index - 1, 0)]
    hi = grid[min(best_index + 1, len(grid) - 1)]
    golden = golden_section_max(lambda b: evaluate(b).value, lo, hi, BETA_TOLERANCE)

    best = max(evaluated.values(), key=lambda r: r.value)
    chosen_beta, chosen = None, None
    for beta in sorted(evaluated):
        result = evaluated[beta]
        tie = max(best.abs_err, result.abs_err, 4.0 * np.finfo(float).eps * best.value)
        if result.value >= best.value - tie:
            chosen_beta, chosen = beta, result
            break

    direction = Direction(beta=chosen_beta)
    argmax_param = direction.alpha(n) if p.is_infinity else chosen_beta
    logger.info(
        f"sup over direction n={n} p={p.label}: {chosen.value!r} at beta={chosen_beta!r} "
        f"({len(evaluated)} evaluations)"
    )
    return ConstantResult(
        value=chosen.value,
        abs_err=chosen.abs_err + golden.spread,
        argmax_param=argmax_param,
        argmax_beta=chosen_beta,
        method=_sup_method(n, p),
    )
