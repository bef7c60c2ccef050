"""
Generalized derivative engine.

D_p f(t) = lim_{h->0} [f(p(t, h)) - f(t)] / h is evaluated three ways:
    gd_limit: the difference quotient on both signs of h with Richardson
        extrapolation; one side only when the other leaves the domain
    gd_lift: the weighted classical form p_h(t, 0) f'(t)
    gd_second: the composed operator p_h (p_h f')'
A limit that does not exist is reported as an outcome, not raised.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from gencalc.core.config import settings
from gencalc.core.errors import DerivativeError, DomainError, LiftInapplicableError
from gencalc.core.logging import get_metrics_logger
from gencalc.core.models import DerivativeMethod, DerivativeOutcome, DerivativeResult
from gencalc.services.derivative_service.functions import RealFunction
from gencalc.services.pmap_service import PMap, ph_at_zero
from gencalc.utils.numerics import (
    central_derivative,
    one_sided_derivative,
    one_sided_quotient_steps,
    richardson_extrapolate,
)

logger = logging.getLogger(__name__)


def _base_step(t: float, base_step: Optional[float]) -> float:
    return base_step if base_step is not None else settings.DERIV_BASE_STEP * max(1.0, abs(t))


def _converged(estimate: float, error: float) -> bool:
    return (
        math.isfinite(estimate)
        and math.isfinite(error)
        and error <= settings.DERIV_CONV_TOL * max(1.0, abs(estimate))
    )


def _side_limit(
    pm: PMap, f: RealFunction, t: float, ft: float, h0: float, depth: int, sign: int
) -> Optional[Tuple[float, float]]:
    """(limit, error) along sign * h, or None when p(t, h) leaves the domain."""
    steps = one_sided_quotient_steps(h0, depth, sign)
    with np.errstate(all="ignore"):
        points = [float(pm.evaluate(t, h)) for h in steps]
        if not pm.domain.contains_all(points):
            return None
        quotients: List[float] = [(float(f(x)) - ft) / h for x, h in zip(points, steps)]
    if not all(math.isfinite(q) for q in quotients):
        return math.nan, math.inf
    return richardson_extrapolate(quotients, power_step=1)


def gd_limit(
    pm: PMap,
    f: RealFunction,
    t: float,
    base_step: Optional[float] = None,
    depth: Optional[int] = None,
) -> DerivativeResult:
    """
    Generalized derivative by its limit definition.

    Args:
        pm: The p-map
        f: Function evaluable on the range of p near (t, 0)
        t: Point of pm.domain
        base_step: h0; defaults to DERIV_BASE_STEP * max(1, |t|)
        depth: Richardson depth; defaults to RICHARDSON_DEPTH

    Returns:
        DerivativeResult; outcome NOT_DIFFERENTIABLE when a one-sided limit
        diverges or the two sides disagree

    Raises:
        DomainError: If t is outside the domain
        DerivativeError: If f(t) is not finite or neither side stays in the domain
    """
    if not pm.domain.contains(t):
        raise DomainError(f"t={t} lies outside the domain {pm.domain} of {pm.label}")
    h0 = _base_step(t, base_step)
    depth = depth or settings.RICHARDSON_DEPTH
    with np.errstate(all="ignore"):
        ft = float(f(t))
    if not math.isfinite(ft):
        raise DerivativeError(f"{f.label}({t}) is not finite", details={"t": t})

    right = _side_limit(pm, f, t, ft, h0, depth, +1)
    left = _side_limit(pm, f, t, ft, h0, depth, -1)
    if right is None and left is None:
        raise DerivativeError(
            f"p(t, h) leaves the domain on both sides of t={t} for {pm.label}",
            details={"t": t, "h0": h0},
        )

    one_sided = None
    if right is None or left is None:
        one_sided = "left" if right is None else "right"
        value, error = left if right is None else right
        ok = _converged(value, error)
        spread = error
    else:
        (value_r, error_r), (value_l, error_l) = right, left
        ok = _converged(value_r, error_r) and _converged(value_l, error_l)
        spread = abs(value_r - value_l) if ok else math.inf
        tolerance = (
            settings.DERIV_SIDE_RTOL * max(abs(value_r), abs(value_l))
            + settings.DERIV_SIDE_ATOL
            + error_r
            + error_l
        )
        ok = ok and spread <= tolerance
        value = 0.5 * (value_r + value_l)

    if ok:
        result = DerivativeResult(
            value=value,
            method=DerivativeMethod.LIMIT,
            estimated_error=spread,
            one_sided=one_sided,
        )
    else:
        result = DerivativeResult(
            value=None,
            method=DerivativeMethod.LIMIT,
            outcome=DerivativeOutcome.NOT_DIFFERENTIABLE,
            estimated_error=spread if math.isfinite(spread) else 0.0,
            one_sided=one_sided,
        )
    get_metrics_logger().log_derivative(
        pm.label, t, "limit", result.outcome.value, result.estimated_error
    )
    return result


def first_derivative(f: RealFunction, t: float) -> Tuple[float, float]:
    """
    Classical f'(t): analytic when available, else matching one-sided limits.

    Returns:
        (f'(t), error estimate)

    Raises:
        LiftInapplicableError: If f is not differentiable at t
    """
    if f.derivative is not None:
        value = f.d(t)
        if value is None:
            raise LiftInapplicableError(
                f"{f.label}'({t}) does not exist", details={"t": t, "function": f.label}
            )
        return value, 0.0
    h0 = settings.DERIV_BASE_STEP * max(1.0, abs(t))
    depth = settings.RICHARDSON_DEPTH

    def func(x):
        return float(f(x))

    with np.errstate(all="ignore"):
        forward = one_sided_derivative(func, t, h0, depth, +1)
        backward = one_sided_derivative(func, t, h0, depth, -1)
    agree = (
        _converged(*forward)
        and _converged(*backward)
        and abs(forward[0] - backward[0])
        <= settings.DERIV_SIDE_RTOL * max(abs(forward[0]), abs(backward[0]))
        + settings.DERIV_SIDE_ATOL
        + forward[1]
        + backward[1]
    )
    if not agree:
        raise LiftInapplicableError(
            f"{f.label} has no classical derivative at t={t}",
            details={"t": t, "forward": forward[0], "backward": backward[0]},
        )
    return 0.5 * (forward[0] + backward[0]), abs(forward[0] - backward[0])


def gd_lift(pm: PMap, f: RealFunction, t: float) -> DerivativeResult:
    """
    Generalized derivative as the weighted classical derivative p_h(t, 0) f'(t).

    Raises:
        LiftInapplicableError: If f'(t) does not exist
        DomainError: If t is outside the domain
    """
    weight = ph_at_zero(pm, t)
    fprime, error = first_derivative(f, t)
    result = DerivativeResult(
        value=weight * fprime, method=DerivativeMethod.LIFT, estimated_error=abs(weight) * error
    )
    get_metrics_logger().log_derivative(pm.label, t, "lift", "ok", result.estimated_error)
    return result


def _room(pm: PMap, t: float) -> float:
    """Distance from t to the nearest domain end or singular point."""
    distances = [t - pm.domain.lo, pm.domain.hi - t] + [abs(t - s) for s in pm.singular_points]
    return min(d for d in distances if not math.isnan(d))


def gd_second(
    pm: PMap, f: RealFunction, t: float, base_step: Optional[float] = None
) -> float:
    """
    Composed second-order operator D(D f)(t) = p_h(t, 0) (p_h(., 0) f')'(t).

    The inner product p_h f' uses the analytic f' when f carries one; the outer
    derivative is a Richardson central difference kept away from the domain
    ends and from singular points of p_h.

    Raises:
        DerivativeError: If the inner product is not differentiable at t
        DomainError: If t is outside the domain
    """
    if not pm.domain.contains(t):
        raise DomainError(f"t={t} lies outside the domain {pm.domain} of {pm.label}")
    if t in pm.singular_points:
        raise DerivativeError(f"t={t} is a singular point of p_h for {pm.label}")

    def inner(s: float) -> float:
        if f.derivative is not None:
            fprime = float(f.derivative(s))
        else:
            h = settings.DERIV_BASE_STEP * max(1.0, abs(s))
            fprime = central_derivative(lambda x: float(f(x)), s, h, settings.RICHARDSON_DEPTH)[0]
        return ph_at_zero(pm, s) * fprime

    room = _room(pm, t)
    h0 = base_step or settings.DERIV_SECOND_STEP * max(1.0, abs(t))
    with np.errstate(all="ignore"):
        if room > 0.0:
            h0 = min(h0, 0.5 * room)
            value, error = central_derivative(inner, t, h0, settings.RICHARDSON_DEPTH)
        else:
            sign = +1 if t == pm.domain.lo else -1
            value, error = one_sided_derivative(inner, t, h0, settings.RICHARDSON_DEPTH, sign)
    if not _converged(value, error):
        raise DerivativeError(
            f"p_h * {f.label}' is not differentiable at t={t}",
            details={"t": t, "estimate": value, "error": error},
        )
    return ph_at_zero(pm, t) * value
