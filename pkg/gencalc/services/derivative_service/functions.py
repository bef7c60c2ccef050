"""
Real functions with optional analytic derivatives.

RealFunction values compose through sum, product, quotient and composition,
carrying the analytic derivative along whenever both operands have one. The
builtin catalog is addressable by name from the CLI.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from gencalc.core.errors import ConfigurationError
from gencalc.core.models import FunctionSpec

logger = logging.getLogger(__name__)

Scalar = Callable[[float], float]


@dataclass(frozen=True)
class RealFunction:
    """A real function f with an optional analytic derivative f'."""

    func: Scalar
    derivative: Optional[Scalar] = None
    label: str = "f"
    constant_value: Optional[float] = None

    def __call__(self, t):
        return self.func(t)

    def d(self, t: float) -> Optional[float]:
        """Analytic f'(t); None when unknown or undefined at t."""
        if self.derivative is None:
            return None
        with np.errstate(all="ignore"):
            value = float(self.derivative(t))
        return value if np.isfinite(value) else None

    def __add__(self, other: "RealFunction") -> "RealFunction":
        f, g = self, other
        deriv = None
        if f.derivative is not None and g.derivative is not None:

            def deriv(t):
                return f.derivative(t) + g.derivative(t)

        return RealFunction(lambda t: f(t) + g(t), deriv, f"({f.label}+{g.label})")

    def __mul__(self, other: "RealFunction") -> "RealFunction":
        f, g = self, other
        deriv = None
        if f.derivative is not None and g.derivative is not None:

            def deriv(t):
                return f(t) * g.derivative(t) + g(t) * f.derivative(t)

        return RealFunction(lambda t: f(t) * g(t), deriv, f"({f.label}*{g.label})")

    def __truediv__(self, other: "RealFunction") -> "RealFunction":
        f, g = self, other
        deriv = None
        if f.derivative is not None and g.derivative is not None:

            def deriv(t):
                gt = g(t)
                return (gt * f.derivative(t) - f(t) * g.derivative(t)) / (gt * gt)

        return RealFunction(lambda t: f(t) / g(t), deriv, f"({f.label}/{g.label})")

    def compose(self, inner: "RealFunction") -> "RealFunction":
        """The composition self(inner(t))."""
        g, f = self, inner
        deriv = None
        if f.derivative is not None and g.derivative is not None:

            def deriv(t):
                return g.derivative(f(t)) * f.derivative(t)

        return RealFunction(lambda t: g(f(t)), deriv, f"{g.label}({f.label})")

    def scaled(self, c: float) -> "RealFunction":
        """The function c * f."""
        f = self
        deriv = None
        if f.derivative is not None:

            def deriv(t):
                return c * f.derivative(t)

        return RealFunction(lambda t: c * f(t), deriv, f"{c:g}*{f.label}")

    def shifted(self, s: float) -> "RealFunction":
        """The function f(t - s)."""
        f = self
        deriv = None
        if f.derivative is not None:

            def deriv(t):
                return f.derivative(t - s)

        return RealFunction(lambda t: f(t - s), deriv, f"{f.label}(t-{s:g})")


class BuiltinFunction(Enum):
    """Enum defining the builtin functions."""

    IDENTITY = "identity"
    SQUARE = "square"
    CUBE = "cube"
    SIN = "sin"
    COS = "cos"
    EXP = "exp"
    LOG = "log"
    ABS = "abs"
    SGN_RIGHT = "sgn_right"
    SGN_LEFT = "sgn_left"


def _kink(t):
    # derivative of |t| and of the sign steps is undefined at 0
    return np.where(np.asarray(t) == 0.0, np.nan, 0.0)[()]


_BUILTINS = {
    BuiltinFunction.IDENTITY: (lambda t: t, lambda t: np.ones_like(np.asarray(t, float))[()]),
    BuiltinFunction.SQUARE: (lambda t: t * t, lambda t: 2.0 * t),
    BuiltinFunction.CUBE: (lambda t: t * t * t, lambda t: 3.0 * t * t),
    BuiltinFunction.SIN: (np.sin, np.cos),
    BuiltinFunction.COS: (np.cos, lambda t: -np.sin(t)),
    BuiltinFunction.EXP: (np.exp, np.exp),
    BuiltinFunction.LOG: (np.log, lambda t: 1.0 / t),
    BuiltinFunction.ABS: (np.abs, lambda t: np.sign(t) + _kink(t)),
    BuiltinFunction.SGN_RIGHT: (lambda t: np.where(np.asarray(t) >= 0.0, 1.0, -1.0)[()], _kink),
    BuiltinFunction.SGN_LEFT: (lambda t: np.where(np.asarray(t) > 0.0, 1.0, -1.0)[()], _kink),
}


def builtin_function(name: str) -> RealFunction:
    """
    Get a builtin function by name.

    Raises:
        ConfigurationError: If the name is unknown
    """
    try:
        key = BuiltinFunction(name)
    except ValueError:
        available = [f.value for f in BuiltinFunction]
        raise ConfigurationError(
            f"Invalid function name: {name}. Available functions: {', '.join(available)}"
        ) from None
    func, deriv = _BUILTINS[key]
    return RealFunction(func, deriv, key.value)


def constant(value: float) -> RealFunction:
    """The constant function t -> value."""
    return RealFunction(
        lambda t: value * np.ones_like(np.asarray(t, dtype=float))[()],
        lambda t: np.zeros_like(np.asarray(t, dtype=float))[()],
        f"{value:g}",
        constant_value=float(value),
    )


def function_from_spec(spec: FunctionSpec) -> RealFunction:
    """Build scale * builtin(t - shift), or a constant, from its run-config form."""
    if spec.name == "constant":
        return constant(spec.value)
    f = builtin_function(spec.name)
    if spec.shift:
        f = f.shifted(spec.shift)
    if spec.scale != 1.0:
        f = f.scaled(spec.scale)
    return f
