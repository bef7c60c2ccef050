"""
Finite differences with Richardson extrapolation.

Tables are built on the step sequence h0 / 2**k. One-sided difference quotients
carry an error expansion in every power of h; central ones in even powers only.
"""
import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np

from gencalc.core.errors import NonConvergenceError

logger = logging.getLogger(__name__)

RATIO = 2.0


def richardson_table(values: Sequence[float], power_step: int = 1) -> List[List[float]]:
    """
    Build the Richardson (Neville) tableau for quotients sampled at h0 / 2**k.

    Args:
        values: Quotient values for k = 0, 1, ..., n-1
        power_step: 1 for expansions in h, h^2, ...; 2 for h^2, h^4, ...

    Returns:
        Lower triangular tableau; table[k][j] eliminates the first j error terms
    """
    table: List[List[float]] = []
    for k, value in enumerate(values):
        row = [float(value)]
        for j in range(1, k + 1):
            factor = RATIO ** (power_step * j)
            row.append((factor * row[j - 1] - table[k - 1][j - 1]) / (factor - 1.0))
        table.append(row)
    return table


def richardson_extrapolate(values: Sequence[float], power_step: int = 1) -> Tuple[float, float]:
    """
    Extrapolate a quotient sequence to h = 0.

    Returns:
        (estimate, error) where error compares the last diagonal entry with the
        best entry one order lower
    """
    if not values:
        raise ValueError("Richardson extrapolation needs at least one sample")
    table = richardson_table(values, power_step)
    last = table[-1]
    if len(last) == 1:
        return last[0], math.inf
    estimate = last[-1]
    error = max(abs(estimate - last[-2]), abs(estimate - table[-2][-1]))
    return estimate, error


def one_sided_quotient_steps(h0: float, depth: int, sign: int) -> np.ndarray:
    """Signed steps sign * h0 / 2**k for k = 0..depth."""
    return sign * h0 / RATIO ** np.arange(depth + 1)


def one_sided_derivative(
    func: Callable[[float], float], x: float, h0: float, depth: int, sign: int
) -> Tuple[float, float]:
    """
    One-sided derivative of func at x from the right (sign=+1) or left (sign=-1).

    Returns:
        (estimate, error)
    """
    fx = func(x)
    quotients = [(func(x + h) - fx) / h for h in one_sided_quotient_steps(h0, depth, sign)]
    return richardson_extrapolate(quotients, power_step=1)


def central_derivative(
    func: Callable[[float], float], x: float, h0: float, depth: int
) -> Tuple[float, float]:
    """
    Central difference derivative of func at x with even-power extrapolation.

    Returns:
        (estimate, error)
    """
    steps = h0 / RATIO ** np.arange(depth + 1)
    quotients = [(func(x + h) - func(x - h)) / (2.0 * h) for h in steps]
    return richardson_extrapolate(quotients, power_step=2)


def converged_central_derivative(
    func: Callable[[float], float],
    x: float,
    h0: float,
    rtol: float,
    atol: float,
    max_levels: int = 14,
) -> float:
    """
    Central difference derivative refined until successive estimates agree.

    The step is halved and the tableau extended one level at a time; the best
    diagonal entries of two consecutive levels must agree to rtol (with an
    absolute floor atol).

    Raises:
        NonConvergenceError: if agreement is not reached within max_levels
    """
    quotients: List[float] = []
    previous = None
    h = h0
    for level in range(max_levels):
        quotients.append((func(x + h) - func(x - h)) / (2.0 * h))
        table = richardson_table(quotients, power_step=2)
        current = table[-1][-1]
        if not math.isfinite(current):
            break
        if previous is not None and abs(current - previous) <= rtol * abs(current) + atol:
            logger.debug(f"Central difference at x={x:.6g} converged after {level + 1} levels")
            return current
        previous = current
        h /= RATIO
    raise NonConvergenceError(
        f"Central difference quotient at x={x:.6g} did not converge",
        details={"x": x, "h0": h0, "last_estimate": previous, "rtol": rtol},
    )
