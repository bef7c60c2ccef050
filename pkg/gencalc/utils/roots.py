"""Bracket scanning on a fixed grid followed by Brent's method."""
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

logger = logging.getLogger(__name__)


def sign_change_brackets(
    func: Callable[[float], float], grid: Sequence[float]
) -> Tuple[List[Tuple[float, float]], List[float]]:
    """
    Scan a sorted grid for sign changes of func.

    Non-finite values break the scan locally: a pair touching one is skipped.

    Returns:
        (brackets, exact_roots) where brackets are adjacent grid pairs with a
        strict sign change and exact_roots are grid points where func is 0
    """
    with np.errstate(all="ignore"):
        values = []
        for x in grid:
            try:
                values.append(float(func(x)))
            except (OverflowError, ZeroDivisionError, ValueError):
                values.append(math.nan)
    brackets: List[Tuple[float, float]] = []
    exact: List[float] = []
    for x, v in zip(grid, values):
        if v == 0.0:
            exact.append(float(x))
    for (x0, v0), (x1, v1) in zip(zip(grid[:-1], values[:-1]), zip(grid[1:], values[1:])):
        if not (math.isfinite(v0) and math.isfinite(v1)):
            continue
        if v0 * v1 < 0.0:
            brackets.append((float(x0), float(x1)))
    return brackets, exact


def root_nearest(
    func: Callable[[float], float],
    grid: Sequence[float],
    target: float = 0.0,
    xtol: float = 1e-300,
    rtol: float = 1e-14,
) -> Optional[float]:
    """
    Root of func closest to target among the brackets found on grid.

    Returns:
        The root, or None when the grid shows no sign change and no exact zero
    """
    brackets, exact = sign_change_brackets(func, grid)
    candidates: List[float] = list(exact)
    if brackets:
        lo, hi = min(brackets, key=lambda br: min(abs(br[0] - target), abs(br[1] - target)))
        with np.errstate(all="ignore"):
            candidates.append(optimize.brentq(func, lo, hi, xtol=xtol, rtol=rtol))
    if not candidates:
        return None
    return min(candidates, key=lambda x: abs(x - target))


def geometric_grid(delta: float, depth: int, wide_powers: int = 0) -> np.ndarray:
    """
    Symmetric grid {0} U {+-delta * 2**-k, k=0..depth} U {+-2**k, k=0..wide_powers}.

    Args:
        delta: Half-width of the fine part
        depth: Number of halvings of delta
        wide_powers: Largest power of two in the coarse part; 0 disables it

    Returns:
        Sorted array of grid points
    """
    fine = delta / 2.0 ** np.arange(depth + 1)
    parts = [np.array([0.0]), fine, -fine]
    if wide_powers > 0:
        wide = 2.0 ** np.arange(wide_powers + 1)
        parts.extend([wide, -wide])
    return np.unique(np.concatenate(parts))
