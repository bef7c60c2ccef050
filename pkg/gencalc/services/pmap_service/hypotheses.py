"""
Numerical checks of the p-map hypotheses.

H1+ / H1-: p(t, h) = t +- eps has a solution h(t, eps) with h -> 0 as eps -> 0.
H2: 1 / p_h(., 0) is integrable over the domain.
Continuity: p(t, h) -> p(t, 0) as h -> 0.

Solvability only asserts existence, so the search is exhaustive on a geometric
grid down to machine scale; integrability is decided by quadrature convergence.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from gencalc.core.config import settings
from gencalc.core.errors import ConfigurationError, DomainError
from gencalc.core.logging import get_metrics_logger
from gencalc.core.models import HypothesisReport, HypothesisSample
from gencalc.services.pmap_service.base import PMap
from gencalc.services.pmap_service.catalog import ph_at_zero
from gencalc.utils.quadrature import integrate_checked
from gencalc.utils.roots import geometric_grid, root_nearest

logger = logging.getLogger(__name__)

DEFAULT_EPS_GRID = tuple(10.0 ** -k for k in range(1, 11))
WIDE_POWERS = 10


def neighbourhood_width(pm: PMap, t: float) -> float:
    """Default delta = 0.5 * min(t - a, b - t, 1), ignoring zero distances."""
    distances = [1.0]
    for d in (t - pm.domain.lo, pm.domain.hi - t):
        if math.isfinite(d) and d > 0.0:
            distances.append(d)
    return 0.5 * min(distances)


def _solve_shift(pm: PMap, t: float, target: float, grid: np.ndarray) -> Optional[float]:
    def residual(h: float) -> float:
        return float(pm.evaluate(t, h)) - target

    return root_nearest(residual, grid)


def _check_side(
    pm: PMap, ts: Sequence[float], eps_grid: Sequence[float], sign: int
) -> Tuple[bool, List[HypothesisSample], List[str]]:
    name = "h1_plus" if sign > 0 else "h1_minus"
    symbol = "+" if sign > 0 else "-"
    evidence: List[HypothesisSample] = []
    failures: List[str] = []
    for t in ts:
        delta = neighbourhood_width(pm, t)
        grid = geometric_grid(delta, settings.BISECTION_DEPTH, WIDE_POWERS)
        path: List[float] = []
        for eps in eps_grid:
            h = _solve_shift(pm, t, t + sign * eps, grid)
            if h is None:
                failures.append(
                    f"{name}: p(t,h) = t{symbol}eps has no solution at t={t:.6g}, eps={eps:.3g}"
                )
                evidence.append(HypothesisSample(t=t, eps=eps))
                break
            evidence.append(
                HypothesisSample(t=t, eps=eps, h=h, abs_h=abs(h), inside_delta=abs(h) < delta)
            )
            path.append(abs(h))
        else:
            increasing = any(b > a * (1.0 + 1e-9) for a, b in zip(path[:-1], path[1:]))
            if increasing or path[-1] > settings.H_LIMIT_TOL * delta:
                failures.append(
                    f"{name}: h(t,eps) does not tend to 0 at t={t:.6g} "
                    f"(final |h|={path[-1]:.3g}, delta={delta:.3g})"
                )
    return not failures, evidence, failures


def _check_continuity(pm: PMap, ts: Sequence[float]) -> bool:
    for t in ts:
        delta = neighbourhood_width(pm, t)
        base = float(pm.evaluate(t, 0.0))
        if not math.isfinite(base):
            return False
        tiny = delta * 2.0 ** -settings.BISECTION_DEPTH
        for h in (tiny, -tiny):
            if abs(float(pm.evaluate(t, h)) - base) > 1e-9 * max(1.0, abs(t)):
                return False
    return True


def _inverse_ph(pm: PMap):
    def integrand(s: float) -> float:
        with np.errstate(divide="ignore"):
            return abs(1.0 / np.float64(ph_at_zero(pm, s)))

    return integrand


def check_h2(pm: PMap) -> Tuple[bool, Optional[float], str]:
    """
    Integrability of |1 / p_h(., 0)| over the p-map domain.

    Returns:
        (holds, integral estimate, diagnostic message)
    """
    if not pm.domain.finite:
        return False, None, "h2: unbounded domain"
    result = integrate_checked(
        _inverse_ph(pm),
        pm.domain.lo,
        pm.domain.hi,
        pm.singular_points,
        settings.QUAD_REFINE_RTOL,
    )
    if not result.converged:
        return False, None, f"h2: quadrature of |1/p_h| did not converge ({result.message})"
    return True, result.value, ""


def check_hypotheses(
    pm: PMap,
    sample_ts: Optional[Sequence[float]] = None,
    eps_grid: Optional[Sequence[float]] = None,
) -> HypothesisReport:
    """
    Check H1+, H1-, H2 and continuity at h = 0 for a p-map.

    Args:
        pm: The p-map
        sample_ts: Points of the domain to test; interior samples by default
        eps_grid: Strictly decreasing positive shifts; 1e-1 .. 1e-10 by default

    Returns:
        HypothesisReport with per-sample evidence

    Raises:
        DomainError: If a sample lies outside the domain
        ConfigurationError: If eps_grid is not strictly decreasing and positive
    """
    if sample_ts is None:
        sample_ts = pm.domain.interior_samples(7)
    ts = [float(t) for t in sample_ts]
    eps = [float(e) for e in (eps_grid if eps_grid is not None else DEFAULT_EPS_GRID)]
    for t in ts:
        if not pm.domain.contains(t):
            raise DomainError(f"Sample t={t} lies outside {pm.domain}")
    if not eps or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps[:-1], eps[1:])):
        raise ConfigurationError("eps_grid must be positive and strictly decreasing")

    plus_ok, plus_evidence, plus_failures = _check_side(pm, ts, eps, +1)
    minus_ok, minus_evidence, minus_failures = _check_side(pm, ts, eps, -1)
    continuity = _check_continuity(pm, ts)
    h2_ok, h2_value, h2_message = check_h2(pm)

    failures = plus_failures + minus_failures
    if not continuity:
        failures.append("continuity: p(t,h) does not approach p(t,0) as h -> 0")
    if h2_message:
        failures.append(h2_message)

    report = HypothesisReport(
        h1_plus=plus_ok,
        h1_minus=minus_ok,
        h2=h2_ok,
        continuity_at_zero=continuity,
        h1_plus_evidence=plus_evidence,
        h1_minus_evidence=minus_evidence,
        h2_integral=h2_value,
        failures=failures,
    )
    get_metrics_logger().log_hypotheses(
        pm.label,
        {
            "h1_plus": report.h1_plus,
            "h1_minus": report.h1_minus,
            "h2": report.h2,
            "continuity_at_zero": report.continuity_at_zero,
        },
    )
    return report
