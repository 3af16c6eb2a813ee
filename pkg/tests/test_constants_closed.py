"""Tests for closed-form constants and auxiliary integrals."""
import math

import numpy as np
import pytest

from hs_sharp.constants_closed import (
    c1_closed,
    c2_closed,
    cinf_closed,
    cinf_schwarz_majorant,
    cinf_tangential,
    closed_constant,
    moment_integrals,
    oscillation_constant,
    p1_tangential,
    p_n,
    wallis_integral,
)
from hs_sharp.models import Exponent
from hs_sharp.quadrature import integrate_1d
from hs_sharp.special_fn import DomainError, sphere_area


class TestClosedForms:
    """Test C_1, C_2 and C_inf."""

    def test_cinf_values(self):
        """Test 4/(3 sqrt 3) for n = 3 and 3 sqrt 3/(2 pi) for n = 4."""
        assert cinf_closed(3) == pytest.approx(4.0 / (3.0 * math.sqrt(3.0)), rel=1e-14)
        assert cinf_closed(4) == pytest.approx(3.0 * math.sqrt(3.0) / (2.0 * math.pi), rel=1e-14)
        assert cinf_closed(3) == pytest.approx(0.7698004, abs=1e-7)
        assert cinf_closed(4) == pytest.approx(0.8269933, abs=1e-7)

    def test_cinf_half_plane(self):
        """Test C_inf = 2/pi in the half-plane."""
        assert cinf_closed(2) == pytest.approx(2.0 / math.pi, rel=1e-14)

    def test_c1(self):
        """Test C_1 = 2(n-1)/omega_n."""
        assert c1_closed(2) == pytest.approx(1.0 / math.pi, rel=1e-14)
        assert c1_closed(3) == pytest.approx(1.0 / math.pi, rel=1e-14)
        for n in range(2, 12):
            assert c1_closed(n) == pytest.approx(2.0 * (n - 1) / sphere_area(n), rel=1e-13)

    def test_c2(self):
        """Test C_2 = sqrt(n(n-1)/(2^n omega_n))."""
        for n in range(2, 12):
            expected = math.sqrt(n * (n - 1) / (2.0 ** n * sphere_area(n)))
            assert c2_closed(n) == pytest.approx(expected, rel=1e-13)
        assert c2_closed(2) == pytest.approx(1.0 / (2.0 * math.sqrt(math.pi)), rel=1e-14)

    def test_high_dimension_finite(self):
        """Test that closed forms stay finite well past n = 50."""
        for n in (60, 120, 200):
            for value in (c1_closed(n), c2_closed(n), cinf_closed(n)):
                assert math.isfinite(value)
                assert value > 0

    def test_oscillation_constant(self):
        """Test that the oscillation coefficient is half of C_inf."""
        assert oscillation_constant(5) == pytest.approx(cinf_closed(5) / 2.0, rel=1e-15)

    def test_closed_constant_dispatch(self):
        """Test that only p in {1, 2, inf} has a closed form."""
        assert closed_constant(3, Exponent.one()) == c1_closed(3)
        assert closed_constant(3, Exponent.finite(2.0)) == c2_closed(3)
        assert closed_constant(3, Exponent.infinity()) == cinf_closed(3)
        assert closed_constant(3, Exponent.finite(2.5)) is None

    def test_rejects_small_dimension(self):
        """Test that n < 2 raises DomainError."""
        with pytest.raises(DomainError) as exc_info:
            cinf_closed(1)

        assert exc_info.value.parameter == "n"


class TestAuxiliaryIntegrals:
    """Test the moment integrals, P_n and the C_inf majorant."""

    def test_moment_ratio(self):
        """Test I1 = (n-1) I2."""
        for n in range(3, 10):
            i1, i2 = moment_integrals(n)
            assert i1 == pytest.approx((n - 1) * i2, rel=1e-14)

    def test_moment_n3(self):
        """Test I2 = 9 (pi/2) int cos^5 sin^3 = 3 pi / 16 for n = 3."""
        _, i2 = moment_integrals(3)
        assert i2 == pytest.approx(3.0 * math.pi / 16.0, rel=1e-14)

    def test_moment_by_quadrature(self):
        """Test I2 against direct quadrature of its factors for n = 5."""
        n = 5
        phi_part = integrate_1d(lambda p: np.cos(p) ** 2 * np.sin(p) ** (n - 3), 0.0, math.pi).value
        t_part = integrate_1d(lambda t: np.cos(t) ** (n + 2) * np.sin(t) ** n, 0.0, math.pi / 2).value
        _, i2 = moment_integrals(n)
        assert i2 == pytest.approx(n * n * phi_part * t_part, rel=1e-11)

    def test_moment_needs_n3(self):
        """Test that the sin^{n-3} weight requires n >= 3."""
        with pytest.raises(DomainError):
            moment_integrals(2)

    def test_p_n_product_identity(self):
        """Test P_n(y) P_n(-y) = (4(n-1) y^2 + n^2)^{(2-n)/2}."""
        y = np.linspace(-30.0, 30.0, 241)
        for n in (2, 3, 5, 9):
            product = p_n(y, n) * p_n(-y, n)
            expected = (4.0 * (n - 1) * y * y + n * n) ** (0.5 * (2 - n))
            np.testing.assert_allclose(product, expected, rtol=1e-12)

    def test_p_n_at_zero(self):
        """Test P_n(0) = n^{-(n-2)/2} and scalar output for scalar input."""
        value = p_n(0.0, 4)
        assert isinstance(value, float)
        assert value == pytest.approx(0.25, rel=1e-15)

    def test_wallis(self):
        """Test int_0^1 (1 - t^2)^{(n-4)/2} dt for n = 4 and n = 6."""
        assert wallis_integral(4) == pytest.approx(1.0, rel=1e-14)
        assert wallis_integral(6) == pytest.approx(2.0 / 3.0, rel=1e-14)

    def test_majorant_meets_lower_bound(self):
        """Test that the majorant equals C_inf at alpha = 0 and decreases."""
        n = 4
        assert cinf_schwarz_majorant(n, 0.0) == pytest.approx(cinf_closed(n), rel=1e-15)
        values = [cinf_schwarz_majorant(n, a) for a in (0.0, 0.5, 1.0, 4.0, math.inf)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert values[-1] == pytest.approx(cinf_closed(n) * math.sqrt(10.0 / 12.0), rel=1e-14)

    def test_majorant_rejects_negative_alpha(self):
        """Test that alpha < 0 raises DomainError."""
        with pytest.raises(DomainError) as exc_info:
            cinf_schwarz_majorant(3, -1.0)

        assert exc_info.value.parameter == "alpha"


class TestTangentialConstants:
    """Test direction-resolved constants for the tangential direction."""

    def test_cinf_tangential_n3(self):
        """Test 4 omega_1 / omega_3 = 2/pi."""
        assert cinf_tangential(3) == pytest.approx(2.0 / math.pi, rel=1e-14)

    def test_tangential_below_normal(self):
        """Test C_inf(tangential) < C_inf."""
        for n in range(3, 10):
            assert cinf_tangential(n) < cinf_closed(n)

    def test_p1_tangential_n3(self):
        """Test 3 (4/5)^2 sqrt(1/5) / (2 pi) for n = 3."""
        expected = 3.0 * 0.64 * math.sqrt(0.2) / (2.0 * math.pi)
        assert p1_tangential(3) == pytest.approx(expected, rel=1e-14)
        assert p1_tangential(3) == pytest.approx(0.1366584, abs=1e-7)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
