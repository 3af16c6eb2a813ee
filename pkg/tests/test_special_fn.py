"""Tests for Gamma-function and sphere-measure primitives."""
import math

import numpy as np
import pytest

from hs_sharp.quadrature import integrate_1d
from hs_sharp.special_fn import (
    DomainError,
    ball_volume,
    half_ball_moment,
    log_binomial,
    log_gamma,
    log_sphere_area,
    sine_moment,
    sphere_area,
)


class TestLogGamma:
    """Test ln Gamma."""

    def test_known_values(self):
        """Test Gamma(1/2) = sqrt(pi) and Gamma(5) = 24."""
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)

    def test_rejects_nonpositive(self):
        """Test that x <= 0 raises DomainError carrying the argument."""
        with pytest.raises(DomainError) as exc_info:
            log_gamma(0.0)

        error = exc_info.value
        assert error.parameter == "x"
        assert error.value == 0.0

    def test_rejects_infinity(self):
        """Test that an infinite argument is rejected."""
        with pytest.raises(DomainError):
            log_gamma(math.inf)


class TestSphereArea:
    """Test omega_n = |S^{n-1}|."""

    def test_low_dimensions(self):
        """Test the two-point sphere, the circle and the 2-sphere."""
        assert sphere_area(1) == pytest.approx(2.0, rel=1e-14)
        assert sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)

    def test_recursion(self):
        """Test omega_{n+2} = 2 pi omega_n / n."""
        for n in range(1, 30):
            assert sphere_area(n + 2) == pytest.approx(2.0 * math.pi * sphere_area(n) / n, rel=1e-12)

    def test_large_dimension_stays_finite(self):
        """Test that the log form is usable far past the overflow range of Gamma."""
        value = log_sphere_area(400)
        assert math.isfinite(value)
        assert value < 0

    def test_rejects_zero(self):
        """Test that n < 1 raises DomainError."""
        with pytest.raises(DomainError) as exc_info:
            sphere_area(0)

        assert exc_info.value.parameter == "n"


class TestMoments:
    """Test sine moments, binomials and ball integrals."""

    def test_sine_moment(self):
        """Test int_0^pi sin^k for k = 0, 1, 2."""
        assert sine_moment(0) == pytest.approx(math.pi, rel=1e-14)
        assert sine_moment(1) == pytest.approx(2.0, rel=1e-14)
        assert sine_moment(2) == pytest.approx(math.pi / 2.0, rel=1e-14)

    def test_sine_moment_matches_quadrature(self):
        """Test sine_moment(k) against adaptive quadrature for k <= 30."""
        for k in range(31):
            expected = integrate_1d(lambda x: np.sin(x) ** k, 0.0, math.pi).value
            assert sine_moment(k) == pytest.approx(expected, rel=1e-12)

    def test_sphere_from_sine_moment(self):
        """Test omega_n = omega_{n-1} int_0^pi sin^{n-2}."""
        for n in range(3, 12):
            assert sphere_area(n) == pytest.approx(sphere_area(n - 1) * sine_moment(n - 2), rel=1e-12)

    def test_log_binomial(self):
        """Test C(5, 2) = 10 and the out-of-range error."""
        assert log_binomial(5, 2) == pytest.approx(math.log(10.0), rel=1e-14)
        with pytest.raises(DomainError):
            log_binomial(3, 4)

    def test_half_ball_moment(self):
        """Test int over the unit ball of R^{n-1} of (1 - |y|^2)^a."""
        # interval [-1, 1]
        assert half_ball_moment(2, 0.0) == pytest.approx(2.0, rel=1e-14)
        # unit disk, a = 1: 2 pi int_0^1 (1 - r^2) r dr
        assert half_ball_moment(3, 1.0) == pytest.approx(math.pi / 2.0, rel=1e-14)

    def test_ball_volume(self):
        """Test the volume of balls in R and R^2."""
        assert ball_volume(1, 3.0) == pytest.approx(6.0, rel=1e-14)
        assert ball_volume(2, 2.0) == pytest.approx(4.0 * math.pi, rel=1e-14)
        assert ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
