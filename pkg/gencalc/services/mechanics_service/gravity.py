"""
Projectile motion under constant gravity, D^2 x = 0 and D^2 y = -g.

The slow-time solution is x = x0 + u0 tau, y = y0 + v0 tau - g tau^2 / 2.
With an antiderivative of 1/p_h at hand tau is exact; otherwise y is the
double integral y0 + v0 tau(t) - g int_0^t tau(s) / p_h(s) ds evaluated with
nested quadrature.
"""
import logging
from typing import Sequence

import numpy as np

from gencalc.core.errors import MechanicsError
from gencalc.services.mechanics_service.base import TIME_ORIGIN, Trajectory, tau_from_origin
from gencalc.services.pmap_service import PMap, ph_at_zero
from gencalc.utils.quadrature import cumulative_integral, require_integral

logger = logging.getLogger(__name__)

METHODS = ("auto", "quadrature", "closed_form")


def _quadrature_paths(pm: PMap, ts: np.ndarray):
    def inv_ph(s: float) -> float:
        return 1.0 / ph_at_zero(pm, s)

    def inner_tau(s: float) -> float:
        return require_integral(inv_ph, TIME_ORIGIN, s, pm.singular_points, "slow time")

    def weighted_tau(s: float) -> float:
        return inner_tau(s) * inv_ph(s)

    tau = cumulative_integral(inv_ph, ts, TIME_ORIGIN, pm.singular_points, "slow time")
    double = cumulative_integral(
        weighted_tau, ts, TIME_ORIGIN, pm.singular_points, "gravity double integral"
    )
    return tau, double


def gravity_solve(
    pm: PMap,
    x0: float,
    u0: float,
    y0: float,
    v0: float,
    g: float,
    ts: Sequence[float],
    method: str = "auto",
) -> Trajectory:
    """
    Position and generalized velocity of a projectile.

    Args:
        pm: The p-map, with 1/p_h integrable from 0
        x0, y0: Initial position
        u0, v0: Initial generalized velocities Dx(0), Dy(0)
        g: Gravitational acceleration
        ts: Sorted sample times, ts[0] >= 0
        method: closed_form needs a known antiderivative of 1/p_h, quadrature
            always integrates, auto picks closed_form when it can

    Returns:
        Trajectory with columns x, y, Dx, Dy

    Raises:
        MechanicsError: On an unknown method or a closed form the p-map cannot provide
        QuadratureError: If the inner integral diverges
    """
    if method not in METHODS:
        raise MechanicsError(f"Unknown gravity method {method!r}; use one of {METHODS}")
    ts = np.asarray(ts, dtype=float)
    closed = method == "closed_form" or (
        method == "auto" and pm.inv_ph_antiderivative is not None
    )
    if closed:
        if pm.inv_ph_antiderivative is None:
            raise MechanicsError(f"{pm.label} has no closed-form slow time")
        tau = tau_from_origin(pm, ts)
        double = 0.5 * tau**2
    else:
        tau, double = _quadrature_paths(pm, ts)
    states = np.column_stack(
        [x0 + u0 * tau, y0 + v0 * tau - g * double, np.full_like(tau, u0), v0 - g * tau]
    )
    logger.debug(f"Gravity on {pm.label} ({'closed form' if closed else 'quadrature'})")
    return Trajectory(ts, states, ("x", "y", "Dx", "Dy"), tau=tau, kind="gravity")


def slow_time_threshold(alpha: float) -> float:
    """
    Time after which the fractional height exceeds the classical one.

    For 0 < alpha < 1 and v0 = 0, y0 - g t^(2 alpha) / (2 alpha^2) > y0 - g t^2 / 2
    exactly when t^alpha / alpha < t, that is t > alpha^(1 / (alpha - 1)).
    """
    if not 0.0 < alpha < 1.0:
        raise MechanicsError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha ** (1.0 / (alpha - 1.0))
