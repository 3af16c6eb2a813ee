"""Closed forms for the sharp constants and their auxiliary integrals.

These are the ground truth the numerical routes in ``variational`` are
checked against. Only p = 1, 2 and inf have closed forms; other exponents are
defined numerically.
"""
import math
from typing import Optional, Union

import numpy as np

from .models import Exponent, ExponentKind
from .special_fn import LOG_PI, DomainError, log_gamma, log_sphere_area, sphere_area

ArrayLike = Union[float, np.ndarray]


def _check_dim(n: int, minimum: int = 2) -> None:
    if int(n) != n or n < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {n}", "n", n)


def c1_closed(n: int) -> float:
    """C_1 = 2(n-1)/omega_n = (n-1) Gamma(n/2) / pi^{n/2}."""
    _check_dim(n)
    return (n - 1) * math.exp(log_gamma(0.5 * n) - 0.5 * n * LOG_PI)


def c2_closed(n: int) -> float:
    """C_2 = sqrt(n(n-1) / (2^n omega_n)) = sqrt((n-1) Gamma((n+2)/2) / (2^n pi^{n/2}))."""
    _check_dim(n)
    log_square = math.log(n - 1) + log_gamma(0.5 * (n + 2)) - n * math.log(2.0) - 0.5 * n * LOG_PI
    return math.exp(0.5 * log_square)


def cinf_closed(n: int) -> float:
    """C_inf = 4 (n-1)^{(n-1)/2} omega_{n-1} / (n^{n/2} omega_n)."""
    _check_dim(n)
    log_value = (
        math.log(4.0)
        + 0.5 * (n - 1) * math.log(n - 1)
        - 0.5 * n * math.log(n)
        + log_sphere_area(n - 1)
        - log_sphere_area(n)
    )
    return math.exp(log_value)


def oscillation_constant(n: int) -> float:
    """Coefficient of osc(f)/x_n in the gradient bound, C_inf/2."""
    return cinf_closed(n) / 2.0


def closed_constant(n: int, p: Exponent) -> Optional[float]:
    """Closed form C_p for p in {1, 2, inf}; None for every other exponent."""
    if p.kind == ExponentKind.ONE:
        return c1_closed(n)
    if p.kind == ExponentKind.INFINITY:
        return cinf_closed(n)
    if p.value == 2.0:
        return c2_closed(n)
    return None


def moment_integrals(n: int) -> tuple[float, float]:
    """
    The two moment integrals behind C_2.

    I1 = int_0^pi sin^{n-3}phi dphi int_0^{pi/2} (n cos^2 t - 1)^2 cos^n t sin^{n-2} t dt
    and I2 = n^2 int int cos^2 phi sin^{n-3}phi cos^{n+2} t sin^n t dt dphi,
    with I1 = (n-1) I2.

    Args:
        n: Dimension, n >= 3

    Returns:
        (I1, I2)

    Raises:
        DomainError: If n < 3 (the sin^{n-3} weight needs n >= 3)
    """
    _check_dim(n, minimum=3)
    log_i2 = (
        0.5 * LOG_PI
        + math.log(n)
        + log_gamma(0.5 * (n - 2))
        + log_gamma(0.5 * (n + 1))
        - math.log(8.0)
        - log_gamma(float(n))
    )
    i2 = math.exp(log_i2)
    return (n - 1) * i2, i2


def log_p_n(y: ArrayLike, n: int) -> ArrayLike:
    """ln P_n(y); ln(sqrt(1+y^2) + y) is asinh(y), exact for either sign of y."""
    _check_dim(n)
    log_s = np.arcsinh(np.asarray(y, dtype=float))
    log_denominator = np.logaddexp(0.0, math.log(n - 1) + 2.0 * log_s) if n > 2 else 0.0
    out = (n - 1) * log_s - 0.5 * (n - 2) * log_denominator
    return float(out) if np.ndim(out) == 0 else out


def p_n(y: ArrayLike, n: int) -> ArrayLike:
    """
    P_n(y) = s^{n-1} / (1 + (n-1) s^2)^{(n-2)/2} with s = sqrt(1+y^2) + y.

    Works elementwise on arrays. P_n(y) P_n(-y) = (4(n-1) y^2 + n^2)^{(2-n)/2}.
    """
    out = np.exp(log_p_n(y, n))
    return float(out) if np.ndim(out) == 0 else out


def wallis_integral(n: int) -> float:
    """int_0^1 (1-t^2)^{(n-4)/2} dt = sqrt(pi) Gamma((n-2)/2) / (2 Gamma((n-1)/2)), n >= 3."""
    _check_dim(n, minimum=3)
    return math.exp(0.5 * LOG_PI + log_gamma(0.5 * (n - 2)) - log_gamma(0.5 * (n - 1))) / 2.0


def cinf_schwarz_majorant(n: int, alpha: float) -> float:
    """
    Cauchy-Schwarz majorant of the alpha-parameterized C_inf integral.

    Equals cinf_closed(n) * sqrt((n^2 + (3n-2) alpha^2) / (n^2 + 4(n-1) alpha^2)),
    which decreases in alpha and meets the alpha = 0 lower bound.
    """
    _check_dim(n, minimum=3)
    if alpha < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha}", "alpha", alpha)
    if math.isinf(alpha):
        ratio = (3 * n - 2) / (4.0 * (n - 1))
    else:
        a2 = alpha * alpha
        ratio = (n * n + (3 * n - 2) * a2) / (n * n + 4 * (n - 1) * a2)
    return cinf_closed(n) * math.sqrt(ratio)


def cinf_tangential(n: int) -> float:
    """C_inf(z) for z tangential to the boundary, 4 omega_{n-2} / ((n-2) omega_n)."""
    _check_dim(n, minimum=3)
    return 4.0 * sphere_area(n - 2) / ((n - 2) * sphere_area(n))


def p1_tangential(n: int) -> float:
    """
    C_1(z) for z tangential to the boundary.

    The hemisphere supremum reduces to n t^{n+1} sqrt(1-t^2), maximal at
    t^2 = (n+1)/(n+2).
    """
    _check_dim(n)
    tau = (n + 1) / (n + 2)
    return 2.0 / sphere_area(n) * n * tau ** (0.5 * (n + 1)) * math.sqrt(1.0 - tau)
