"""
Time change tau(t) = int_a^t ds / (P(s) p_h(s, 0)).

In the new variable D reduces to d/dtau, so a generalized problem becomes a
classical one. tau is tabulated on a grid graded towards the ends and any
singular points and refined until linear interpolation is accurate to
TIME_CHANGE_TOL.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from gencalc.core.config import settings
from gencalc.core.errors import NonInvertibleTimeChangeError, QuadratureError
from gencalc.services.pmap_service import PMap, ph_at_zero
from gencalc.services.sturm_liouville_service.problem import SLProblem
from gencalc.utils.quadrature import cumulative_integral, require_integral

logger = logging.getLogger(__name__)

_GRADING_DEPTH = 52
_MAX_PASSES = 60
_BISECTION_STEPS = 64


@dataclass(frozen=True, eq=False)
class TimeChange:
    """
    Tabulated tau(t) on [a, b] with tau(a) = 0.

    Attributes:
        t_grid: Sorted grid over [a, b]
        tau_grid: tau at t_grid
        c: max of tau over the grid
        monotone: Whether the integrand keeps a strict sign
        exact: Closed form of tau when one is known
    """

    t_grid: np.ndarray
    tau_grid: np.ndarray
    c: float
    monotone: bool
    exact: Optional[Callable] = None

    @property
    def a(self) -> float:
        return float(self.t_grid[0])

    @property
    def b(self) -> float:
        return float(self.t_grid[-1])

    def tau(self, t):
        """tau(t), exact when possible, interpolated otherwise."""
        if self.exact is not None:
            return self.exact(t)
        return np.interp(t, self.t_grid, self.tau_grid)

    def inverse(self, tau):
        """
        t(tau) for a monotone time change.

        Raises:
            NonInvertibleTimeChangeError: If tau is not monotone
        """
        if not self.monotone:
            raise NonInvertibleTimeChangeError(
                "tau is not monotone on the interval; it has no inverse",
                details={"a": self.a, "b": self.b},
            )
        increasing = self.tau_grid[-1] > self.tau_grid[0]
        ts, taus = (self.t_grid, self.tau_grid) if increasing else (
            self.t_grid[::-1],
            self.tau_grid[::-1],
        )
        target = np.atleast_1d(np.asarray(tau, dtype=float))
        guess = np.interp(target, taus, ts)
        if self.exact is None:
            return guess if np.ndim(tau) else float(guess[0])

        # polish against the closed form by bisection inside the grid cell
        idx = np.clip(np.searchsorted(taus, target), 1, len(taus) - 1)
        lo, hi = ts[idx - 1].copy(), ts[idx].copy()
        if not increasing:
            lo, hi = np.minimum(lo, hi), np.maximum(lo, hi)
        sign = 1.0 if increasing else -1.0
        with np.errstate(all="ignore"):
            for _ in range(_BISECTION_STEPS):
                mid = 0.5 * (lo + hi)
                above = sign * (self.exact(mid) - target) > 0.0
                hi = np.where(above, mid, hi)
                lo = np.where(above, lo, mid)
        result = 0.5 * (lo + hi)
        return result if np.ndim(tau) else float(result[0])


def _initial_grid(a: float, b: float, singular: Iterable[float], n_grid: int) -> np.ndarray:
    width = b - a
    offsets = width * 2.0 ** -np.arange(1, _GRADING_DEPTH + 1)
    parts = [np.linspace(a, b, max(n_grid, 2)), a + offsets, b - offsets]
    for s in singular:
        parts.extend([np.array([s]), s + offsets, s - offsets])
    grid = np.unique(np.concatenate(parts))
    return grid[(grid >= a) & (grid <= b)]


def _tabulate(
    integrand: Callable[[float], float],
    a: float,
    b: float,
    singular: Iterable[float],
    exact: Optional[Callable],
    n_grid: int,
) -> TimeChange:
    singular = [s for s in singular if a < s < b]
    ts = _initial_grid(a, b, singular, n_grid)
    if exact is not None:
        taus = np.asarray(exact(ts), dtype=float)
    else:
        taus = cumulative_integral(integrand, ts, a, singular, "time change")

    tol = settings.TIME_CHANGE_TOL
    max_points = settings.TIME_CHANGE_MAX_POINTS
    done = np.zeros(ts.size - 1, dtype=bool)
    for _ in range(_MAX_PASSES):
        mids = 0.5 * (ts[:-1] + ts[1:])
        check = ~done & (mids > ts[:-1]) & (mids < ts[1:])
        if exact is not None:
            tau_mid = np.asarray(exact(mids), dtype=float)
        else:
            tau_mid = np.full(mids.shape, np.nan)
            for i in np.nonzero(check)[0]:
                tau_mid[i] = taus[i] + require_integral(
                    integrand, ts[i], mids[i], singular, "time change"
                )
        error = np.where(check, np.abs(tau_mid - 0.5 * (taus[:-1] + taus[1:])), 0.0)
        bad = check & (error > tol)
        done |= ~bad
        if not bad.any():
            break
        if ts.size + bad.sum() > max_points:
            logger.warning(
                f"Time-change grid capped at {max_points} points; "
                f"interpolation error {error.max():.3g} exceeds {tol:g}",
                extra={"extra": {"max_error": float(error.max()), "points": int(ts.size)}},
            )
            break
        where = np.nonzero(bad)[0] + 1
        ts = np.insert(ts, where, mids[bad])
        taus = np.insert(taus, where, tau_mid[bad])
        done = np.repeat(done, 1 + bad.astype(int))

    cells = 0.5 * (ts[:-1] + ts[1:])
    cells = cells[(cells > a) & (cells < b) & ~np.isin(cells, singular)]
    with np.errstate(all="ignore"):
        signs = np.sign([integrand(s) for s in cells])
    monotone = bool(np.all(signs > 0) or np.all(signs < 0))
    logger.debug(f"Time change on [{a:g}, {b:g}]: {ts.size} points, monotone={monotone}")
    return TimeChange(
        t_grid=ts, tau_grid=taus, c=float(np.max(taus)), monotone=monotone, exact=exact
    )


def time_change(prob: SLProblem, n_grid: int = 200) -> TimeChange:
    """
    Tabulate tau(t) = int_a^t ds / (P p_h) for a Sturm-Liouville problem.

    The p-map antiderivative of 1/p_h is used when P is constant, adaptive
    quadrature split at the singular points otherwise.

    Raises:
        QuadratureError: If the integral diverges
    """
    exact = None
    p_const = prob.P.constant_value
    if p_const is not None and prob.pm.inv_ph_antiderivative is not None:
        a = prob.a

        def exact(t):
            return prob.pm.tau(t, a) / p_const

    return _tabulate(prob.inv_R, prob.a, prob.b, prob.singular_points, exact, n_grid)


def pmap_time_change(pm: PMap, a: float, b: float, n_grid: int = 200) -> TimeChange:
    """
    tau(t) = int_a^t ds / p_h(s, 0) for a bare p-map, as used by the mechanics.

    Raises:
        QuadratureError: If the integral diverges
    """
    exact = None
    if pm.inv_ph_antiderivative is not None:

        def exact(t):
            return pm.tau(t, a)

    def integrand(s: float) -> float:
        return 1.0 / ph_at_zero(pm, s)

    try:
        return _tabulate(integrand, a, b, pm.singular_points, exact, n_grid)
    except QuadratureError as e:
        raise QuadratureError(f"1/p_h is not integrable from {a:g}: {e}", e.details) from e
