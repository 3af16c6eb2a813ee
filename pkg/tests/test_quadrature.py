"""Tests for Gauss-Legendre quadrature and its kink-splitting 2D form."""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from hs_sharp.quadrature import (
    NonConvergenceError,
    gauss_legendre,
    integrate_1d,
    integrate_2d_split,
    integrate_graded,
    integrate_inner,
    tanh_sinh_map,
)
from hs_sharp.schemas import QuadratureSpec
from hs_sharp.special_fn import DomainError


class TestGaussLegendre:
    """Test node and weight tables."""

    def test_weights_sum_to_interval_length(self):
        """Test that weights integrate 1 over [-1, 1]."""
        for order in (2, 8, 32, 128):
            _, weights = gauss_legendre(order)
            assert weights.sum() == pytest.approx(2.0, rel=1e-14)

    def test_exact_for_polynomials(self):
        """Test exactness for degree 2*order - 1."""
        nodes, weights = gauss_legendre(4)
        assert float(weights @ nodes ** 6) == pytest.approx(2.0 / 7.0, rel=1e-14)

    def test_tables_are_read_only(self):
        """Test that the cached arrays cannot be modified."""
        nodes, _ = gauss_legendre(16)
        with pytest.raises(ValueError):
            nodes[0] = 0.0

    def test_rejects_order_one(self):
        """Test that order < 2 raises DomainError."""
        with pytest.raises(DomainError) as exc_info:
            gauss_legendre(1)

        assert exc_info.value.parameter == "order"


class TestIntegrate1D:
    """Test adaptive integration on an interval."""

    def test_sine(self):
        """Test int_0^pi sin = 2."""
        result = integrate_1d(np.sin, 0.0, math.pi)
        assert result.value == pytest.approx(2.0, rel=1e-12)
        assert result.abs_err < 1e-9
        assert result.evaluations > 0

    def test_kink_needs_bisection(self):
        """Test a |x - c| kink away from panel edges."""
        result = integrate_1d(lambda x: np.abs(x - 0.3), 0.0, 1.0, QuadratureSpec(rel_tol=1e-8, max_refinements=40))
        assert result.value == pytest.approx(0.5 * (0.3 ** 2 + 0.7 ** 2), rel=1e-7)

    def test_empty_interval(self):
        """Test that a = b integrates to zero without evaluations."""
        result = integrate_1d(np.sin, 1.0, 1.0)
        assert result.value == 0.0
        assert result.evaluations == 0

    def test_reversed_interval(self):
        """Test that a > b raises DomainError."""
        with pytest.raises(DomainError) as exc_info:
            integrate_1d(np.sin, 1.0, 0.0)

        assert exc_info.value.parameter == "range"

    def test_non_finite_integrand(self):
        """Test that a non-finite value at a node raises DomainError."""
        with pytest.raises(DomainError):
            integrate_1d(lambda x: np.full_like(x, np.nan), 0.0, 1.0)

    def test_nonconvergence_reports_best_estimate(self):
        """Test the error raised when the refinement budget runs out."""
        spec = QuadratureSpec(base_order=2, max_refinements=0, abs_tol=1e-14, rel_tol=1e-14)
        with pytest.raises(NonConvergenceError) as exc_info:
            integrate_1d(lambda x: np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, spec)

        error = exc_info.value
        assert error.refinements == 0
        assert error.error_estimate > 0
        assert error.best_estimate == pytest.approx(0.5, abs=0.05)

    def test_deterministic(self):
        """Test that repeated calls give bit-identical results."""
        first = integrate_1d(lambda x: np.exp(-x * x), -3.0, 2.0)
        second = integrate_1d(lambda x: np.exp(-x * x), -3.0, 2.0)
        assert first == second


def cosine_power_integral(a: float) -> float:
    """int_0^{pi/2} cos^a = sqrt(pi) Gamma((a+1)/2) / (2 Gamma(a/2 + 1))."""
    return 0.5 * math.sqrt(math.pi) * math.exp(math.lgamma(0.5 * (a + 1.0)) - math.lgamma(0.5 * a + 1.0))


class TestIntegrateGraded:
    """Test the tanh-sinh mapped 1D rule."""

    def test_map_stays_inside_interval(self):
        """Test that mapped points lie in [lo, hi] and approach both ends."""
        s = np.linspace(-3.5, 3.5, 71)
        theta, jacobian = tanh_sinh_map(0.0, math.pi / 2, s)
        assert np.all(theta >= 0.0) and np.all(theta <= math.pi / 2)
        assert np.all(np.diff(theta) >= 0.0)
        assert theta[0] < 1e-20
        assert math.pi / 2 - theta[-1] < 1e-15
        assert np.all(jacobian > 0.0)

    @pytest.mark.parametrize("a", [0.003, 0.01, 0.3, 2.5])
    def test_fractional_cosine_power(self, a):
        """Test int_0^{pi/2} cos^a for small non-integer a."""
        result = integrate_graded(lambda t: np.cos(t) ** a, 0.0, math.pi / 2)
        assert result.value == pytest.approx(cosine_power_integral(a), rel=1e-10)

    def test_inverse_square_root_endpoint(self):
        """Test int_0^1 x^{-1/2} = 2 with the singular end never evaluated."""
        result = integrate_graded(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0)
        assert result.value == pytest.approx(2.0, rel=1e-10)

    def test_smooth_integrand(self):
        """Test int_0^1 e^x = e - 1."""
        result = integrate_graded(np.exp, 0.0, 1.0)
        assert result.value == pytest.approx(math.e - 1.0, rel=1e-12)

    def test_empty_and_reversed(self):
        """Test a = b and a > b."""
        assert integrate_graded(np.sin, 2.0, 2.0).value == 0.0
        with pytest.raises(DomainError) as exc_info:
            integrate_graded(np.sin, 1.0, 0.0)

        assert exc_info.value.parameter == "range"


class TestIntegrate2D:
    """Test inner and split double integrals."""

    def test_inner_per_node(self):
        """Test int_0^1 phi theta^2 dtheta = phi/3 at every node."""
        phi = np.array([0.0, 0.5, 2.0])
        values, errors = integrate_inner(
            lambda p, t: p * t * t, phi, np.zeros(3), np.ones(3)
        )
        np.testing.assert_allclose(values, phi / 3.0, rtol=1e-13, atol=1e-15)
        assert np.all(errors >= 0)

    def test_inner_empty_interval(self):
        """Test that hi <= lo gives zero."""
        values, _ = integrate_inner(lambda p, t: np.ones_like(p * t), np.array([1.0]), np.array([1.0]), np.array([1.0]))
        assert values[0] == 0.0

    def test_moving_kink(self):
        """Test int int |theta - phi| over the unit square = 1/3."""
        result = integrate_2d_split(
            lambda p, t: np.abs(t - p), (0.0, 1.0), (0.0, 1.0), kink=lambda p: p
        )
        assert result.value == pytest.approx(1.0 / 3.0, rel=1e-11)

    def test_nan_kink_means_no_split(self):
        """Test that NaN kinks integrate the whole inner range."""
        result = integrate_2d_split(
            lambda p, t: p * t, (0.0, 1.0), (0.0, 1.0), kink=lambda p: np.full_like(p, np.nan)
        )
        assert result.value == pytest.approx(0.25, rel=1e-13)

    def test_kink_outside_range_is_clipped(self):
        """Test that kinks beyond the inner range are clipped."""
        result = integrate_2d_split(
            lambda p, t: np.ones_like(p * t), (0.0, 2.0), (0.0, 1.0), kink=lambda p: p + 5.0
        )
        assert result.value == pytest.approx(2.0, rel=1e-13)

    def test_inner_fractional_endpoint(self):
        """Test cos^a theta on [0, pi/2] per node, graded and exact."""
        phi = np.array([0.003, 0.01, 0.5, 4.0])
        values, _ = integrate_inner(
            lambda p, t: np.cos(t) ** p, phi, np.zeros(4), np.full(4, math.pi / 2)
        )
        expected = [cosine_power_integral(a) for a in phi]
        np.testing.assert_allclose(values, expected, rtol=1e-10)

    def test_ungraded_inner_matches_on_smooth_integrand(self):
        """Test that graded and plain panels agree for a polynomial."""
        phi = np.array([0.5, 1.5])
        graded, _ = integrate_inner(lambda p, t: p * t ** 3, phi, np.zeros(2), np.ones(2))
        plain, _ = integrate_inner(lambda p, t: p * t ** 3, phi, np.zeros(2), np.ones(2), graded=False)
        np.testing.assert_allclose(graded, plain, rtol=1e-12)
        np.testing.assert_allclose(plain, phi / 4.0, rtol=1e-14)

    def test_fixed_kink_abs_cosine(self):
        """Test int_0^{pi/2} |cos theta - 1/2| = sqrt(3) - pi/12 - 1 with the kink at pi/3."""
        result = integrate_2d_split(
            lambda p, t: np.abs(np.cos(t) - 0.5) * np.ones_like(p),
            (0.0, 1.0), (0.0, math.pi / 2),
            kink=lambda p: np.full_like(p, math.pi / 3),
        )
        assert result.value == pytest.approx(math.sqrt(3.0) - math.pi / 12.0 - 1.0, rel=1e-12)

    def test_squared_kernel_moment(self):
        """Test int_0^pi int_0^{pi/2} (3cos^2 - 1)^2 sin cos^3 = 3 pi / 8."""
        def integrand(p, t):
            c = np.cos(t)
            return (3.0 * c * c - 1.0) ** 2 * np.sin(t) * c ** 3 * np.ones_like(p)

        result = integrate_2d_split(
            integrand, (0.0, math.pi), (0.0, math.pi / 2),
            kink=lambda p: np.full_like(p, math.acos(1.0 / math.sqrt(3.0))),
        )
        assert result.value == pytest.approx(3.0 * math.pi / 8.0, rel=1e-12)

    def test_split_matches_unsplit_on_smooth_integrand(self):
        """Test that a split of a smooth integrand changes nothing."""
        def integrand(p, t):
            return np.exp(-p * t) * np.cos(t)

        split = integrate_2d_split(integrand, (0.0, 2.0), (0.0, 1.5), kink=lambda p: np.full_like(p, math.pi / 3))
        whole = integrate_2d_split(integrand, (0.0, 2.0), (0.0, 1.5))
        assert split.value == pytest.approx(whole.value, rel=1e-12)

    def test_doubling_base_order_within_error_estimate(self):
        """Test that a converged result moves by no more than its error estimate."""
        def integrand(p, t):
            return np.abs(np.cos(t) - 0.5 * p) ** 1.5 * np.cos(t) ** 0.2

        def kink(p):
            return np.arccos(0.5 * p)

        first = integrate_2d_split(integrand, (0.0, 1.0), (0.0, math.pi / 2), kink, QuadratureSpec(base_order=32))
        second = integrate_2d_split(integrand, (0.0, 1.0), (0.0, math.pi / 2), kink, QuadratureSpec(base_order=64))
        assert abs(first.value - second.value) <= first.abs_err

    def test_empty_ranges_rejected(self):
        """Test that empty rectangles raise DomainError."""
        with pytest.raises(DomainError):
            integrate_2d_split(lambda p, t: p * t, (1.0, 1.0), (0.0, 1.0))


class TestQuadratureSpec:
    """Test accuracy parameters."""

    def test_defaults(self):
        """Test the documented defaults."""
        spec = QuadratureSpec()
        assert spec.base_order == 32
        assert spec.abs_tol == 1e-12
        assert spec.rel_tol == 1e-10

    def test_tolerance(self):
        """Test max(abs_tol, rel_tol |value|)."""
        spec = QuadratureSpec(abs_tol=1e-6, rel_tol=1e-3)
        assert spec.tolerance(0.0) == 1e-6
        assert spec.tolerance(-10.0) == pytest.approx(1e-2)

    def test_both_tolerances_zero_rejected(self):
        """Test that a spec which can never converge is rejected."""
        with pytest.raises(ValidationError):
            QuadratureSpec(abs_tol=0.0, rel_tol=0.0)

    def test_frozen(self):
        """Test that specs are immutable."""
        spec = QuadratureSpec()
        with pytest.raises(ValidationError):
            spec.base_order = 8


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
