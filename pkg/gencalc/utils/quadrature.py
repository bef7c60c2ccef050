"""
Adaptive quadrature helpers built on QUADPACK.

Integrands may carry integrable singularities at interval ends and at listed
breakpoints. The interval is split there so that no Gauss-Kronrod node lands on
a singular point.
"""
import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence

import numpy as np
from scipy import integrate

from gencalc.core.errors import QuadratureError

logger = logging.getLogger(__name__)

EPSABS = 1e-13
EPSREL = 1e-12
LIMIT = 200
# A piece whose far end is more than GRADE_RATIO times farther from a singular
# anchor than its near end is split geometrically towards the anchor
GRADE_RATIO = 10.0


@dataclass(frozen=True)
class QuadResult:
    """Outcome of an adaptive integration."""

    value: float
    error: float
    converged: bool
    message: str = ""


def split_points(a: float, b: float, points: Iterable[float] = ()) -> List[float]:
    """Sorted [a, interior points..., b] with duplicates removed."""
    lo, hi = min(a, b), max(a, b)
    interior = sorted({float(p) for p in points if lo < p < hi})
    return [lo] + interior + [hi]


def graded_nodes(lo: float, hi: float, anchors: Iterable[float] = ()) -> List[float]:
    """
    Nodes of [lo, hi] graded geometrically towards anchors lying just outside it.

    QUADPACK extrapolates towards a singularity at an interval end; when the
    singularity sits a tiny distance beyond the end it converges to the wrong
    value and still reports success. Anchors are 0 and the listed breakpoints.
    """
    nodes = {lo, hi}
    for c in set(anchors) | {0.0}:
        if c <= lo:
            near, far, sign = lo - c, hi - c, 1.0
        elif c >= hi:
            near, far, sign = c - hi, c - lo, -1.0
        else:
            continue
        if near <= 0.0 or far <= GRADE_RATIO * near:
            continue
        d = near * GRADE_RATIO
        while d < 0.5 * far:
            nodes.add(c + sign * d)
            d *= GRADE_RATIO
    return sorted(n for n in nodes if lo <= n <= hi)


def _quad_piece(func: Callable[[float], float], lo: float, hi: float) -> QuadResult:
    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore")
        try:
            out = integrate.quad(
                func, lo, hi, epsabs=EPSABS, epsrel=EPSREL, limit=LIMIT, full_output=1
            )
        except (ZeroDivisionError, OverflowError, ValueError) as e:
            return QuadResult(math.nan, math.inf, False, str(e))
    value, error = float(out[0]), float(out[1])
    # QUADPACK appends a message only when ier != 0
    converged = len(out) == 3 and math.isfinite(value) and math.isfinite(error)
    message = out[3] if len(out) > 3 else ""
    return QuadResult(value, error, converged, message)


def integrate_split(
    func: Callable[[float], float], a: float, b: float, points: Iterable[float] = ()
) -> QuadResult:
    """
    Integrate func over [a, b] piecewise between breakpoints.

    Args:
        func: Scalar integrand
        a: Lower limit (a > b flips the sign)
        b: Upper limit
        points: Breakpoints; those outside (a, b) are ignored

    Returns:
        QuadResult with the summed value and error estimate
    """
    if a == b:
        return QuadResult(0.0, 0.0, True)
    points = list(points)
    nodes: List[float] = []
    split = split_points(a, b, points)
    for lo, hi in zip(split[:-1], split[1:]):
        nodes.extend(graded_nodes(lo, hi, points)[:-1])
    nodes.append(split[-1])
    total, error, converged, messages = 0.0, 0.0, True, []
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        piece = _quad_piece(func, lo, hi)
        total += piece.value
        error += piece.error
        converged = converged and piece.converged
        if piece.message:
            messages.append(f"[{lo:.6g}, {hi:.6g}]: {piece.message}")
    sign = 1.0 if b > a else -1.0
    return QuadResult(sign * total, error, converged, "; ".join(messages))


def integrate_checked(
    func: Callable[[float], float],
    a: float,
    b: float,
    points: Iterable[float] = (),
    refine_rtol: float = 1e-6,
) -> QuadResult:
    """
    Integrate and confirm the value survives one refinement of the partition.

    The integral is recomputed with every piece split at its midpoint; both runs
    must converge and agree to refine_rtol. Used as the numerical stand-in for
    Lebesgue integrability.
    """
    points = list(points)
    coarse = integrate_split(func, a, b, points)
    nodes = split_points(a, b, points)
    midpoints = [0.5 * (lo + hi) for lo, hi in zip(nodes[:-1], nodes[1:])]
    fine = integrate_split(func, a, b, points + midpoints)
    agree = (
        coarse.converged
        and fine.converged
        and abs(coarse.value - fine.value)
        <= refine_rtol * max(abs(coarse.value), abs(fine.value)) + EPSABS
    )
    if not agree:
        logger.debug(
            f"Refinement check failed on [{a:.6g}, {b:.6g}]: "
            f"{coarse.value!r} vs {fine.value!r} ({coarse.message or fine.message})"
        )
    return QuadResult(
        fine.value,
        max(fine.error, abs(coarse.value - fine.value)),
        agree,
        coarse.message or fine.message,
    )


def require_integral(
    func: Callable[[float], float],
    a: float,
    b: float,
    points: Iterable[float] = (),
    what: str = "integral",
) -> float:
    """
    Integrate and raise QuadratureError when QUADPACK does not converge.

    Returns:
        The integral value
    """
    result = integrate_split(func, a, b, points)
    if not result.converged:
        raise QuadratureError(
            f"The {what} over [{a:.6g}, {b:.6g}] did not converge",
            details={"a": a, "b": b, "value": result.value, "message": result.message},
        )
    return result.value


def cumulative_integral(
    func: Callable[[float], float],
    ts: Sequence[float],
    origin: float,
    points: Iterable[float] = (),
    what: str = "integral",
) -> np.ndarray:
    """
    Running integrals int_origin^t func for every t in ts.

    ts must be sorted ascending with ts[0] >= origin. Each gap is integrated once
    and accumulated.
    """
    ts = np.asarray(ts, dtype=float)
    if ts.size and ts[0] < origin:
        raise ValueError("cumulative_integral needs ts sorted with ts[0] >= origin")
    points = list(points)
    out = np.empty_like(ts)
    running, previous = 0.0, origin
    for i, t in enumerate(ts):
        if t > previous:
            running += require_integral(func, previous, t, points, what)
        out[i] = running
        previous = t
    return out
