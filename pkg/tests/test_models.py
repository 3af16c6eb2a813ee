"""Tests for exponents, directions and half-space points."""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from hs_sharp.models import Direction, Exponent, ExponentKind, HalfSpacePoint
from hs_sharp.special_fn import DomainError


class TestExponent:
    """Test the three-way exponent."""

    def test_parse_variants(self):
        """Test 1, inf and decimal tokens."""
        assert Exponent.parse("1").kind == ExponentKind.ONE
        assert Exponent.parse("1.0").is_one
        assert Exponent.parse("inf").is_infinity
        assert Exponent.parse(" Infinity ").is_infinity
        assert Exponent.parse("2.5").p == 2.5

    def test_parse_rejects_garbage(self):
        """Test that unparseable or too small exponents raise DomainError."""
        for token in ("abc", "0.5", "-3", "nan", ""):
            with pytest.raises(DomainError) as exc_info:
                Exponent.parse(token)

            assert exc_info.value.parameter == "p"

    def test_finite_requires_p_above_one(self):
        """Test that the finite variant rejects p <= 1."""
        with pytest.raises(ValidationError):
            Exponent.finite(1.0)

    def test_conjugate(self):
        """Test q = p/(p-1) including both ends."""
        assert Exponent.one().conjugate == math.inf
        assert Exponent.infinity().conjugate == 1.0
        assert Exponent.finite(2.0).conjugate == 2.0
        assert Exponent.finite(3.0).conjugate == pytest.approx(1.5)

    def test_label(self):
        """Test report labels."""
        assert Exponent.one().label == "1"
        assert Exponent.infinity().label == "inf"
        assert Exponent.finite(2.0).label == "2.0"
        assert str(Exponent.finite(1.5)) == "1.5"

    def test_scaling_power(self):
        """Test (n+p-1)/p, equal to 1 at p = inf."""
        assert Exponent.one().scaling_power(3) == 3.0
        assert Exponent.finite(2.0).scaling_power(3) == 2.0
        assert Exponent.infinity().scaling_power(7) == 1.0

    def test_hashable_and_equal(self):
        """Test that equal exponents compare equal."""
        assert Exponent.parse("2") == Exponent.finite(2.0)
        assert Exponent.parse("inf") != Exponent.one()


class TestDirection:
    """Test directions stored by polar angle."""

    def test_bounds(self):
        """Test that beta outside [0, pi/2] is rejected."""
        with pytest.raises(ValidationError):
            Direction(beta=-0.1)
        with pytest.raises(ValidationError):
            Direction(beta=2.0)

    def test_gamma_and_alpha(self):
        """Test gamma = tan beta and alpha = n gamma / (2 sqrt(n-1))."""
        d = Direction(beta=math.pi / 4)
        assert d.gamma == pytest.approx(1.0)
        assert d.alpha(3) == pytest.approx(3.0 / (2.0 * math.sqrt(2.0)))
        assert Direction.tangential().gamma == math.inf

    def test_from_alpha_inverts_alpha(self):
        """Test Direction.from_alpha(d.alpha(n), n) == d."""
        d = Direction(beta=0.7)
        assert Direction.from_alpha(d.alpha(5), 5).beta == pytest.approx(0.7, rel=1e-14)
        assert Direction.from_gamma(math.inf).beta == math.pi / 2

    def test_negative_gamma_rejected(self):
        """Test that gamma < 0 raises DomainError."""
        with pytest.raises(DomainError):
            Direction.from_gamma(-1.0)

    def test_unit_vector(self):
        """Test (sin beta, 0, ..., cos beta)."""
        z = Direction(beta=0.3).unit_vector(4)
        assert np.linalg.norm(z) == pytest.approx(1.0)
        assert z[1] == 0.0 and z[2] == 0.0
        assert z[-1] == pytest.approx(math.cos(0.3))


class TestHalfSpacePoint:
    """Test points of the upper half-space."""

    def test_requires_positive_height(self):
        """Test that x_n <= 0 is rejected."""
        with pytest.raises(ValidationError):
            HalfSpacePoint(x_prime=(0.0,), x_n=0.0)

    def test_shift_and_scale(self):
        """Test coordinate shifts and dilations."""
        x = HalfSpacePoint(x_prime=(1.0, 2.0), x_n=0.5)
        assert x.dim == 3
        assert x.shifted(1, 0.25).x_prime == (1.0, 2.25)
        assert x.shifted(2, 0.25).x_n == 0.75
        assert x.scaled(2.0) == HalfSpacePoint(x_prime=(2.0, 4.0), x_n=1.0)

    def test_above_origin(self):
        """Test the default evaluation point."""
        x = HalfSpacePoint.above_origin(4, 2.0)
        assert x.x_prime == (0.0, 0.0, 0.0)
        assert x.x_n == 2.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
