"""Executable forms of the algebraic inequality behind the C_inf bound and its corollaries.

The lemma: for x >= 0 and mu >= 1,

    ((mu+1)/(mu+x))^{mu-1} + ((mu+1)/(1+mu x))^{mu-1} x^{mu+1}
        <= 2x + mu(3mu+1)(1-x)^2/(mu+1)^2,

with equality only for mu = 1 or x = 1. Gap functions return LHS - RHS
(nonpositive when the inequality holds). Powers are taken in log space, and
the lemma is written in e = 1 - x with log1p and expm1.

Scans report raw gaps and gaps normalized by a positive scale of the
right-hand side; a point is a violation when either exceeds the tolerance.
The first corollary is the lemma at mu = n - 1 with
x = (sqrt(1+y^2) + y)^{-2}, and both of its gaps are computed through that
identity.
"""
import logging
import math
from typing import Callable, Optional, Union

import numpy as np

from .schemas import EqualityCase, InequalityScanReport, ScanGrid
from .special_fn import DomainError, log_binomial

logger = logging.getLogger("hs-sharp.inequality_lab")

ArrayLike = Union[float, np.ndarray]

# Isolated equality points listed individually in a report
MAX_LISTED_POINTS = 20


def _scalar_or_array(out: np.ndarray) -> ArrayLike:
    return float(out) if np.ndim(out) == 0 else out


def _check_nonnegative(x: np.ndarray, name: str) -> None:
    if np.any(~(x >= 0.0)):
        raise DomainError(f"{name} must be nonnegative", name, None)


def _lemma_unit(e: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """G at x = 1 - e, written as expm1 terms so that it vanishes to full precision near x = 1."""
    with np.errstate(divide="ignore", invalid="ignore"):
        first = -(mu - 1.0) * np.log1p(-e / (mu + 1.0))
        second = -(mu - 1.0) * np.log1p(-mu * e / (mu + 1.0)) + (mu + 1.0) * np.log1p(-e)
    excess = -2.0 * e + mu * (3.0 * mu + 1.0) * e * e / (mu + 1.0) ** 2
    gap = np.expm1(first) + np.expm1(second) - excess
    # mu = 1 is an identity: both sides equal 1 + x^2
    return np.where(mu == 1.0, 0.0, gap)


def lemma_scale(x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """Right-hand side of the lemma, 2x + mu(3mu+1)(1-x)^2/(mu+1)^2 (always positive)."""
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return _scalar_or_array(2.0 * x + mu * (3.0 * mu + 1.0) * (1.0 - x) ** 2 / (mu + 1.0) ** 2)


def lemma_gap(x: ArrayLike, mu: ArrayLike, reflect: bool = True) -> ArrayLike:
    """
    LHS - RHS of the lemma.

    For x > 1 the value is x^2 G(1/x), the reflection identity of the gap,
    which keeps x^{mu+1} from overflowing. Terms are evaluated with
    log1p and expm1 in e = 1 - x, so the gap is accurate near x = 1.
    ``reflect=False`` evaluates the same form directly at every x.

    Args:
        x: x >= 0, scalar or array
        mu: mu >= 1, scalar or array (broadcast against x)
        reflect: Use the reflection for x > 1

    Returns:
        The gap, same shape as the broadcast inputs

    Raises:
        DomainError: If x < 0 or mu < 1
    """
    x, mu = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(mu, dtype=float))
    _check_nonnegative(x, "x")
    if np.any(~(mu >= 1.0)):
        raise DomainError("mu must be at least 1", "mu", None)
    if not reflect:
        return _scalar_or_array(_lemma_unit(1.0 - x, mu))
    big = x > 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        # 1 - 1/x for x > 1, exact in the numerator
        folded = np.where(big, (x - 1.0) / x, 1.0 - x)
    gap = _lemma_unit(folded, mu)
    return _scalar_or_array(np.where(big, x * x * gap, gap))


def lemma_normalized_gap(x: ArrayLike, mu: ArrayLike) -> ArrayLike:
    """lemma_gap / lemma_scale."""
    return _scalar_or_array(np.asarray(lemma_gap(x, mu)) / np.asarray(lemma_scale(x, mu)))


def _check_n(n: int) -> None:
    if int(n) != n or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}", "n", n)


def corollary1_scale(y: ArrayLike, n: int) -> ArrayLike:
    """Right-hand side (2n^2 + 4(n-1)(3n-2) y^2) / n^n."""
    _check_n(n)
    y = np.asarray(y, dtype=float)
    log_rhs = np.log(2.0 * n * n + 4.0 * (n - 1) * (3 * n - 2) * y * y) - n * math.log(n)
    return _scalar_or_array(np.exp(log_rhs))


def corollary1_gap(y: ArrayLike, n: int) -> ArrayLike:
    """
    P_n(y)^2 + P_n(-y)^2 - (2n^2 + 4(n-1)(3n-2) y^2) / n^n.

    Defined for every real y; the expression is even in y. Evaluated as
    corollary1_scale times the lemma's normalized gap at mu = n - 1,
    x = (sqrt(1+y^2) + |y|)^{-2}, which avoids cancelling the two squares
    against the right-hand side.
    """
    _check_n(n)
    return _scalar_or_array(np.asarray(corollary1_scale(y, n)) * np.asarray(corollary1_normalized_gap(y, n)))


def corollary1_normalized_gap(y: ArrayLike, n: int) -> ArrayLike:
    """corollary1_gap / corollary1_scale, evaluated as the lemma at mu = n-1, x = s^{-2}."""
    _check_n(n)
    y = np.abs(np.asarray(y, dtype=float))
    x = np.exp(-2.0 * np.arcsinh(y))
    return lemma_normalized_gap(x, float(n - 1))


def _corollary2_terms(x: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide="ignore"):
        log_base = np.log(np.abs(1.0 - x))
    sign_base = np.sign(1.0 - x)
    log_left = np.log(n + x)
    log_right = np.log1p(n * x)
    total = np.zeros_like(x)
    magnitude = np.zeros_like(x)
    for k in range(3, n + 2):
        log_c = log_binomial(n + 1, k)
        left = np.exp(log_c + k * log_base - (k - 2) * log_left)
        right = np.exp(log_c + k * log_base - (k - 2) * log_right)
        total += sign_base ** k * (left + (-1) ** k * right)
        magnitude += left + right
    return total, magnitude


def corollary2_gap(x: ArrayLike, n: int) -> ArrayLike:
    """
    sum_{k=3}^{n+1} C(n+1,k) [(n+x)^{2-k} + (-1)^k (1+nx)^{2-k}] (1-x)^k.

    Nonpositive, zero only at x = 1. Equals (n+1)^2 lemma_gap(x, n).

    Raises:
        DomainError: If x < 0 or n < 2
    """
    _check_n(n)
    x = np.asarray(x, dtype=float)
    _check_nonnegative(x, "x")
    total, _ = _corollary2_terms(np.atleast_1d(x), n)
    return _scalar_or_array(total.reshape(x.shape))


def corollary2_scale(x: ArrayLike, n: int) -> ArrayLike:
    """Sum of the magnitudes of the terms of corollary2_gap (zero at x = 1)."""
    _check_n(n)
    x = np.asarray(x, dtype=float)
    _, magnitude = _corollary2_terms(np.atleast_1d(x), n)
    return _scalar_or_array(magnitude.reshape(x.shape))


# ============================================================================
# Grid scans
# ============================================================================

def default_lemma_grid() -> ScanGrid:
    """x in [0, 100] (uniform and log-spaced, 10^4 points), mu in [1, 50] (200 points)."""
    return ScanGrid(
        x_lo=0.0, x_hi=100.0, x_count=5000, x_log_count=5000, x_anchors=[1.0],
        second_lo=1.0, second_hi=50.0, second_count=200,
    )


def default_corollary1_grid() -> ScanGrid:
    """y in [0, 50] (10^4 points), n in 2..12."""
    return ScanGrid(
        x_lo=0.0, x_hi=50.0, x_count=10000,
        second_lo=2, second_hi=12, second_count=11, integer_second=True,
    )


def default_corollary2_grid() -> ScanGrid:
    """x in [0, 100] (uniform and log-spaced), n in 2..30."""
    return ScanGrid(
        x_lo=0.0, x_hi=100.0, x_count=2000, x_log_count=2000, x_anchors=[1.0],
        second_lo=2, second_hi=30, second_count=29, integer_second=True,
    )


def grid_axes(grid: ScanGrid) -> tuple[np.ndarray, np.ndarray]:
    """The sorted x axis (uniform, log-spaced and anchor points) and the second axis."""
    parts = [np.linspace(grid.x_lo, grid.x_hi, grid.x_count)]
    if grid.x_log_count and grid.x_hi > 0:
        lo = max(grid.x_log_lo, grid.x_lo) if grid.x_lo > 0 else grid.x_log_lo
        parts.append(np.geomspace(lo, grid.x_hi, grid.x_log_count))
    anchors = [a for a in grid.x_anchors if grid.x_lo <= a <= grid.x_hi]
    if anchors:
        parts.append(np.asarray(anchors, dtype=float))
    xs = np.unique(np.concatenate(parts))
    if grid.integer_second:
        seconds = np.unique(np.round(np.linspace(grid.second_lo, grid.second_hi, grid.second_count)))
    else:
        seconds = np.linspace(grid.second_lo, grid.second_hi, grid.second_count)
    return xs, seconds


def _scan(
    name: str,
    grid: ScanGrid,
    gap_fn: Callable[[np.ndarray, float], np.ndarray],
    normalized_fn: Callable[[np.ndarray, float], np.ndarray],
    x_name: str,
    second_name: str,
    expected_x: Optional[float],
    expected_second: Optional[float]
) -> InequalityScanReport:
    xs, seconds = grid_axes(grid)
    equal = np.zeros((seconds.size, xs.size), dtype=bool)
    max_gap = -math.inf
    max_rel = -math.inf
    argmax = (float(xs[0]), float(seconds[0]))
    violations = 0

    for row, second in enumerate(seconds):
        value = int(second) if grid.integer_second else float(second)
        raw = np.asarray(gap_fn(xs, value))
        normalized = np.asarray(normalized_fn(xs, value))
        max_gap = max(max_gap, float(raw.max()))
        i = int(np.argmax(normalized))
        if normalized[i] > max_rel:
            max_rel = float(normalized[i])
            argmax = (float(xs[i]), float(second))
        violations += int(np.count_nonzero((raw > grid.tolerance) | (normalized > grid.tolerance)))
        equal[row] = np.abs(normalized) <= grid.strict_margin

    cases: list[EqualityCase] = []
    full_columns = equal.all(axis=0)
    full_rows = equal.all(axis=1)
    for j in np.flatnonzero(full_columns):
        cases.append(EqualityCase(variable=x_name, value=float(xs[j])))
    for r in np.flatnonzero(full_rows):
        cases.append(EqualityCase(variable=second_name, value=float(seconds[r])))

    isolated = equal & ~full_columns[None, :] & ~full_rows[:, None]
    rows, cols = np.nonzero(isolated)
    unexplained = 0
    for r, j in zip(rows, cols):
        x_value, second_value = float(xs[j]), float(seconds[r])
        near_x = expected_x is not None and abs(x_value - expected_x) <= grid.equality_window
        near_second = expected_second is not None and abs(second_value - expected_second) <= grid.equality_window
        if not (near_x or near_second):
            unexplained += 1
        if len(cases) < MAX_LISTED_POINTS:
            cases.append(EqualityCase(variable="point", x=x_value, second=second_value))
    for case in cases:
        if case.variable == x_name and (expected_x is None or abs(case.value - expected_x) > grid.equality_window):
            unexplained += 1
        if case.variable == second_name and (
            expected_second is None or abs(case.value - expected_second) > grid.equality_window
        ):
            unexplained += 1

    report = InequalityScanReport(
        inequality=name,
        points=int(xs.size * seconds.size),
        max_gap=max_gap,
        max_rel_gap=max_rel,
        argmax_x=argmax[0],
        argmax_second=argmax[1],
        violations=violations,
        equality_cases=cases,
        unexplained_equalities=unexplained,
    )
    logger.info(
        f"scan {name}: {report.points} points, max normalized gap {max_rel!r}, "
        f"{violations} violations, {len(cases)} equality cases"
    )
    return report


def scan_lemma(grid: Optional[ScanGrid] = None) -> InequalityScanReport:
    """Scan lemma_gap over (x, mu); expected equalities on x = 1 and mu = 1."""
    return _scan(
        "lemma", grid or default_lemma_grid(),
        lambda x, mu: lemma_gap(x, mu),
        lambda x, mu: lemma_normalized_gap(x, mu),
        "x", "mu", 1.0, 1.0,
    )


def scan_corollary1(grid: Optional[ScanGrid] = None) -> InequalityScanReport:
    """Scan corollary1_gap over (y, n); expected equalities on y = 0 and n = 2."""
    return _scan(
        "corollary1", grid or default_corollary1_grid(),
        corollary1_gap, corollary1_normalized_gap,
        "y", "n", 0.0, 2.0,
    )


def scan_corollary2(grid: Optional[ScanGrid] = None) -> InequalityScanReport:
    """Scan corollary2_gap over (x, n); expected equality on x = 1 only."""

    def normalized(x: np.ndarray, n: int) -> np.ndarray:
        total, magnitude = _corollary2_terms(x, n)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(magnitude > 0.0, total / magnitude, 0.0)

    return _scan(
        "corollary2", grid or default_corollary2_grid(),
        corollary2_gap, normalized,
        "x", "n", 1.0, None,
    )


SCANS: dict[str, Callable[[Optional[ScanGrid]], InequalityScanReport]] = {
    "lemma": scan_lemma,
    "corollary1": scan_corollary1,
    "corollary2": scan_corollary2,
}
