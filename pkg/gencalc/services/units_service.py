"""
Alpha-second units.

One SI second is sigma^(1-alpha) alpha-seconds, where sigma is the cosmic time
factor (by default the cesium-133 cycle count). A velocity in m/sec becomes
v sigma^(alpha-1) m/sec^alpha and an acceleration in m/sec^2 becomes
a sigma^(2(alpha-1)) m/sec^(2 alpha).
"""
import logging
import re
from typing import Dict, Optional, Tuple

from pydantic import BaseModel, Field, computed_field

from gencalc.core.config import settings
from gencalc.core.errors import UnitsError

logger = logging.getLogger(__name__)

_UNIT_PATTERN = re.compile(r"^m/s(?:ec)?(?:\^?(?P<power>[12]))?$")


class AlphaQuantity(BaseModel):
    """A magnitude in m^length_power sec^(alpha * time_power_alpha)."""

    magnitude: float
    length_power: int = 1
    time_power_alpha: float = Field(..., description="Exponent on sec^alpha")
    alpha: float = Field(..., gt=0, le=1)

    @property
    def seconds_exponent(self) -> float:
        """Exponent on the plain second, alpha * time_power_alpha."""
        return self.alpha * self.time_power_alpha

    @computed_field  # type: ignore[misc]
    @property
    def unit_string(self) -> str:
        exponent = -self.seconds_exponent
        length = "m" if self.length_power == 1 else f"m^{self.length_power}"
        if exponent == 0:
            return length
        if exponent == 1:
            return f"{length}/sec"
        return f"{length}/sec^{exponent:g}"


def _check(alpha: float, sigma: Optional[float]) -> float:
    if not 0.0 < alpha <= 1.0:
        raise UnitsError(f"alpha must lie in (0, 1], got {alpha}", details={"alpha": alpha})
    sigma = settings.SIGMA if sigma is None else sigma
    if not sigma > 0.0:
        raise UnitsError(f"sigma must be positive, got {sigma}", details={"sigma": sigma})
    return float(sigma)


def _scale(time_power: float, alpha: float, sigma: float) -> float:
    """Factor taking an SI magnitude to alpha-seconds: sigma^(-time_power (alpha - 1))."""
    return sigma ** (-time_power * (alpha - 1.0))


def convert_velocity(v: float, alpha: float, sigma: Optional[float] = None) -> AlphaQuantity:
    """v m/sec as v sigma^(alpha-1) m/sec^alpha."""
    sigma = _check(alpha, sigma)
    return AlphaQuantity(
        magnitude=v * _scale(-1, alpha, sigma), time_power_alpha=-1, alpha=alpha
    )


def convert_acceleration(a: float, alpha: float, sigma: Optional[float] = None) -> AlphaQuantity:
    """a m/sec^2 as a sigma^(2(alpha-1)) m/sec^(2 alpha)."""
    sigma = _check(alpha, sigma)
    return AlphaQuantity(
        magnitude=a * _scale(-2, alpha, sigma), time_power_alpha=-2, alpha=alpha
    )


def to_si(quantity: AlphaQuantity, sigma: Optional[float] = None) -> float:
    """The SI magnitude of an alpha-second quantity."""
    sigma = _check(quantity.alpha, sigma)
    return quantity.magnitude / _scale(quantity.time_power_alpha, quantity.alpha, sigma)


def parse_unit(unit: str) -> int:
    """
    Time power of a supported unit string.

    Returns:
        -1 for m/s (m/sec), -2 for m/s2 (m/s^2, m/sec2, m/sec^2)

    Raises:
        UnitsError: If the unit is not a velocity or an acceleration
    """
    match = _UNIT_PATTERN.match(unit.strip().replace(" ", ""))
    if match is None:
        raise UnitsError(
            f"Unsupported unit: {unit}. Supported units: m/s, m/s2", details={"unit": unit}
        )
    return -int(match.group("power") or 1)


def convert(value: float, unit: str, alpha: float, sigma: Optional[float] = None) -> AlphaQuantity:
    """Convert a velocity or acceleration given with its SI unit string."""
    if parse_unit(unit) == -1:
        return convert_velocity(value, alpha, sigma)
    return convert_acceleration(value, alpha, sigma)


def gravity_term_dimensions(alpha: float) -> Dict[str, Tuple[int, float]]:
    """
    (length power, seconds exponent) of every term of the fractional projectile.

    x = x0 + u0 t^alpha / alpha and y = y0 + v0 t^alpha / alpha - g t^(2 alpha) / (2 alpha^2)
    with u0, v0 in m/sec^alpha and g in m/sec^(2 alpha); every term should come
    out in plain meters.
    """
    _check(alpha, None)
    velocity = AlphaQuantity(magnitude=1.0, time_power_alpha=-1, alpha=alpha)
    acceleration = AlphaQuantity(magnitude=1.0, time_power_alpha=-2, alpha=alpha)
    tau_exponent = alpha
    return {
        "x0": (1, 0.0),
        "u0*tau": (velocity.length_power, velocity.seconds_exponent + tau_exponent),
        "y0": (1, 0.0),
        "v0*tau": (velocity.length_power, velocity.seconds_exponent + tau_exponent),
        "g*tau^2": (acceleration.length_power, acceleration.seconds_exponent + 2 * tau_exponent),
    }
