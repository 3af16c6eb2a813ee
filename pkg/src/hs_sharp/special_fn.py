"""Gamma-function and sphere-measure primitives.

Sphere areas are indexed by the ambient dimension: ``sphere_area(n)`` is
omega_n = |S^{n-1}|, the area of the unit sphere in R^n. So omega_2 = 2*pi
(the circle), omega_3 = 4*pi, and omega_1 = 2 counts the two points of S^0.

Every Gamma evaluation goes through ``log_gamma`` and only final ratios are
exponentiated, which keeps the closed forms finite well past n = 50.
"""
import math

from scipy.special import gammaln

LOG_PI = math.log(math.pi)


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""

    def __init__(self, message: str, parameter: str, value: object):
        super().__init__(message)
        self.parameter = parameter
        self.value = value


def log_gamma(x: float) -> float:
    """
    Natural logarithm of Gamma(x) for x > 0.

    Args:
        x: Positive argument

    Returns:
        ln Gamma(x)

    Raises:
        DomainError: If x is not a positive finite number
    """
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"log_gamma requires x > 0, got {x}", "x", x)
    return float(gammaln(x))


def log_sphere_area(n: int) -> float:
    """ln omega_n = ln 2 + (n/2) ln pi - ln Gamma(n/2)."""
    if n < 1:
        raise DomainError(f"sphere_area requires n >= 1, got {n}", "n", n)
    return math.log(2.0) + 0.5 * n * LOG_PI - log_gamma(0.5 * n)


def sphere_area(n: int) -> float:
    """
    Area omega_n = 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n.

    Args:
        n: Ambient dimension, n >= 1 (n = 1 gives the two-point sphere, 2)

    Returns:
        omega_n

    Raises:
        DomainError: If n < 1
    """
    return math.exp(log_sphere_area(n))


def sine_moment(k: int) -> float:
    """
    Integral of sin^k over [0, pi], sqrt(pi) Gamma((k+1)/2) / Gamma((k+2)/2).

    Args:
        k: Nonnegative power

    Returns:
        The moment

    Raises:
        DomainError: If k < 0
    """
    if k < 0:
        raise DomainError(f"sine_moment requires k >= 0, got {k}", "k", k)
    return math.exp(0.5 * LOG_PI + log_gamma(0.5 * (k + 1)) - log_gamma(0.5 * (k + 2)))


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k) for 0 <= k <= n."""
    if k < 0 or k > n:
        raise DomainError(f"binomial needs 0 <= k <= n, got n={n}, k={k}", "k", k)
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0)


def log_beta(a: float, b: float) -> float:
    """ln B(a, b)."""
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def half_ball_moment(n: int, power: float) -> float:
    """
    Integral of (1 - |y|^2)^power over the unit ball of R^{n-1}.

    Used for exact norms of bump data: omega_{n-1} * B((n-1)/2, power+1) / 2.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}", "n", n)
    if power < 0:
        raise DomainError(f"need power >= 0, got {power}", "power", power)
    return math.exp(log_sphere_area(n - 1) + log_beta(0.5 * (n - 1), power + 1.0)) / 2.0


def ball_volume(m: int, radius: float = 1.0) -> float:
    """Volume of the ball of given radius in R^m (m >= 1)."""
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}", "m", m)
    return math.exp(log_sphere_area(m) - math.log(m)) * radius ** m
