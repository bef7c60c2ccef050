"""
Exception hierarchy for gencalc.

Services raise these; the CLI maps them onto exit codes. A function that is not
p-differentiable is an outcome, not an error, and has no exception here.
"""
from typing import Any, Dict, Optional


class GencalcError(Exception):
    """Base exception class for gencalc errors."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """
        Initialize the error.

        Args:
            message: Human readable description
            details: Structured diagnostic data reported alongside the message
        """
        super().__init__(message)
        self.details = details or {}


class ConfigurationError(GencalcError):
    """Exception raised when a run configuration fails validation."""

    exit_code = 2


class NumericalError(GencalcError):
    """Base exception for numerical failures."""


class NonConvergenceError(NumericalError):
    """Exception raised when an iterative estimate does not settle."""


class QuadratureError(NumericalError):
    """Exception raised when an integral diverges or cannot be resolved."""


class BracketError(NumericalError):
    """Exception raised when no sign change can be found for a root search."""


class IntegrationError(NumericalError):
    """Exception raised when an ODE integration fails."""


class CloseEncounterError(NumericalError):
    """Exception raised when an n-body step would have to shrink below the minimum."""


class PMapError(GencalcError):
    """Exception raised for invalid p-map parameters."""


class DomainError(GencalcError):
    """Exception raised when a point lies outside the working interval."""


class DerivativeError(GencalcError):
    """Exception raised when a derivative cannot be evaluated."""


class LiftInapplicableError(DerivativeError):
    """Exception raised when the weighted classical form needs a missing f'(t)."""


class SLProblemError(GencalcError):
    """Exception raised for ill-posed Sturm-Liouville problems."""


class NonInvertibleTimeChangeError(SLProblemError):
    """Exception raised when tau(t) is not monotone but an inverse is required."""


class MechanicsError(GencalcError):
    """Exception raised for invalid mechanics configurations."""


class UnitsError(GencalcError):
    """Exception raised for unsupported unit conversions."""
