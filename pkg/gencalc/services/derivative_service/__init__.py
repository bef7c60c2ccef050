"""
Derivative service for gencalc.

Evaluates generalized derivatives by the limit definition, by the weighted
classical lift and as the composed second-order operator, and checks the
calculus rules as residuals.
"""
from .engine import first_derivative, gd_lift, gd_limit, gd_second
from .functions import (
    BuiltinFunction,
    RealFunction,
    builtin_function,
    constant,
    function_from_spec,
)
from .rules import RULES, rule_residuals, wrong_chain_residual

__all__ = [
    "RealFunction",
    "BuiltinFunction",
    "builtin_function",
    "constant",
    "function_from_spec",
    "gd_limit",
    "gd_lift",
    "gd_second",
    "first_derivative",
    "rule_residuals",
    "wrong_chain_residual",
    "RULES",
]
