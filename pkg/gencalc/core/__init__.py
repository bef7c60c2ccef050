"""Core package for gencalc."""
from .config import override_settings, settings
from .errors import ConfigurationError, GencalcError, NumericalError
from .models import (
    DerivativeResult,
    ErrorResponse,
    HypothesisReport,
    PMapSpec,
    Spectrum,
    VerifyReport,
)

__all__ = [
    "settings",
    "override_settings",
    "GencalcError",
    "ConfigurationError",
    "NumericalError",
    "PMapSpec",
    "DerivativeResult",
    "HypothesisReport",
    "Spectrum",
    "VerifyReport",
    "ErrorResponse",
]
