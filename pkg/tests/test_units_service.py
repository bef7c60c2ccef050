"""
Tests for alpha-second unit conversion.
"""
import pytest
from pydantic import ValidationError

from gencalc.core.config import settings
from gencalc.core.errors import UnitsError
from gencalc.services.units_service import (
    AlphaQuantity,
    convert,
    convert_acceleration,
    convert_velocity,
    gravity_term_dimensions,
    parse_unit,
    to_si,
)


@pytest.mark.unit
class TestConversion:
    """Tests for SI to alpha-second conversion."""

    def test_velocity_at_near_classical_order(self):
        """3 m/sec is 2.38 m/sec^0.99."""
        q = convert_velocity(3.0, 0.99)
        assert round(q.magnitude, 2) == 2.38
        assert q.unit_string == "m/sec^0.99"

    def test_acceleration_at_near_classical_order(self):
        """9.8 m/sec^2 is 6.19 m/sec^1.98."""
        q = convert_acceleration(9.8, 0.99)
        assert round(q.magnitude, 2) == 6.19
        assert q.unit_string == "m/sec^1.98"

    def test_classical_order_is_identity(self):
        """alpha = 1 leaves magnitudes unchanged."""
        assert convert_velocity(3.0, 1.0).magnitude == 3.0
        assert convert_velocity(3.0, 1.0).unit_string == "m/sec"
        assert convert_acceleration(9.8, 1.0).unit_string == "m/sec^2"

    def test_custom_sigma(self):
        """v sigma^(alpha - 1) with sigma = 4, alpha = 1/2 halves v."""
        assert convert_velocity(3.0, 0.5, sigma=4.0).magnitude == pytest.approx(1.5)
        assert convert_acceleration(3.0, 0.5, sigma=4.0).magnitude == pytest.approx(0.75)

    @pytest.mark.parametrize("alpha", [0.3, 0.75, 0.99])
    def test_back_to_si(self, alpha):
        """to_si undoes the conversion."""
        assert to_si(convert_velocity(3.0, alpha)) == pytest.approx(3.0, rel=1e-12)
        assert to_si(convert_acceleration(9.8, alpha)) == pytest.approx(9.8, rel=1e-12)

    def test_default_sigma_is_cesium_count(self):
        """The cosmic time factor defaults to the cesium-133 cycle count."""
        assert settings.SIGMA == 9_192_631_770

    @pytest.mark.parametrize("alpha,sigma", [(0.0, None), (1.5, None), (0.5, 0.0), (0.5, -2.0)])
    def test_invalid_arguments(self, alpha, sigma):
        """alpha in (0, 1] and sigma > 0."""
        with pytest.raises(UnitsError):
            convert_velocity(1.0, alpha, sigma)

    def test_quantity_validation(self):
        """AlphaQuantity rejects alpha outside (0, 1]."""
        with pytest.raises(ValidationError):
            AlphaQuantity(magnitude=1.0, time_power_alpha=-1, alpha=2.0)

    def test_serialised_unit_string(self):
        """The unit string is part of the dumped model."""
        dumped = convert_velocity(3.0, 0.5).model_dump()
        assert dumped["unit_string"] == "m/sec^0.5"
        assert dumped["alpha"] == 0.5


@pytest.mark.unit
class TestUnitStrings:
    """Tests for unit parsing."""

    @pytest.mark.parametrize(
        "unit,power",
        [
            ("m/s", -1),
            ("m/sec", -1),
            ("m/s2", -2),
            ("m/s^2", -2),
            ("m/sec2", -2),
            ("m/sec^2", -2),
            (" m / s ", -1),
        ],
    )
    def test_parse_unit(self, unit, power):
        """Velocities and accelerations in either spelling."""
        assert parse_unit(unit) == power

    @pytest.mark.parametrize("unit", ["km/h", "m", "m/s3", "s", ""])
    def test_unsupported_unit(self, unit):
        """Other units are refused with the supported list."""
        with pytest.raises(UnitsError, match="Supported units"):
            parse_unit(unit)

    def test_convert_dispatches_on_unit(self):
        """convert picks velocity or acceleration from the unit."""
        assert convert(3.0, "m/s", 0.99).time_power_alpha == -1
        assert convert(9.8, "m/s^2", 0.99).time_power_alpha == -2


@pytest.mark.unit
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.99, 1.0])
def test_gravity_terms_are_lengths(alpha):
    """Every term of the fractional projectile is in plain meters."""
    for name, (length, seconds) in gravity_term_dimensions(alpha).items():
        assert length == 1, name
        assert seconds == pytest.approx(0.0, abs=1e-12), name
