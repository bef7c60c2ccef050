"""
Motion under a linear central force m D^2 r = -m k^2 r.

In slow time the equations are classical, so with tau(t) = int_0^t ds / p_h
    x(t) = c1 sin(k tau) + c2 cos(k tau),  y(t) = d1 sin(k tau) + d2 cos(k tau)
where c1 = Dx(0) / k, c2 = x(0), d1 = Dy(0) / k and d2 = y(0). The orbit obeys
    (d1 x - c1 y)^2 + (d2 x - c2 y)^2 = (d1 c2 - c1 d2)^2
whatever the p-map.
"""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from gencalc.core.errors import MechanicsError
from gencalc.services.derivative_service import RealFunction, gd_second
from gencalc.services.mechanics_service.base import TIME_ORIGIN, Trajectory, tau_from_origin
from gencalc.services.pmap_service import PMap, ph_at_zero
from gencalc.utils.quadrature import require_integral

logger = logging.getLogger(__name__)

Constants = Tuple[float, float, float, float]


@dataclass(frozen=True)
class CentralForceConfig:
    """
    Central-force run.

    Attributes:
        pm: The p-map, defined on [0, t_end]
        k: Force constant, lambda = k^2
        mass: Particle mass
        x0, y0: Initial position
        dx0, dy0: Initial generalized velocities Dx(0), Dy(0)
    """

    pm: PMap
    k: float = 1.0
    mass: float = 1.0
    x0: float = 1.0
    y0: float = 0.0
    dx0: float = 0.0
    dy0: float = 1.0

    def __post_init__(self):
        if not self.k > 0.0:
            raise MechanicsError(f"lambda = k^2 must be positive, got k={self.k}")
        if not self.mass > 0.0:
            raise MechanicsError(f"mass must be positive, got {self.mass}")

    @property
    def constants(self) -> Constants:
        """(c1, c2, d1, d2)."""
        return (self.dx0 / self.k, self.x0, self.dy0 / self.k, self.y0)


def _scalar_tau(pm: PMap):
    if pm.inv_ph_antiderivative is not None:
        return lambda t: float(pm.tau(t, TIME_ORIGIN))

    def inv_ph(s: float) -> float:
        return 1.0 / ph_at_zero(pm, s)

    return lambda t: require_integral(inv_ph, TIME_ORIGIN, t, pm.singular_points, "slow time")


def central_force_components(cfg: CentralForceConfig) -> Tuple[RealFunction, RealFunction]:
    """x(t) and y(t) as RealFunctions carrying x' = Dx / p_h."""
    k, pm = cfg.k, cfg.pm
    c1, c2, d1, d2 = cfg.constants
    tau = _scalar_tau(pm)

    def component(s_coef: float, c_coef: float, name: str) -> RealFunction:
        def value(t):
            phase = k * tau(t)
            return s_coef * math.sin(phase) + c_coef * math.cos(phase)

        def derivative(t):
            phase = k * tau(t)
            return k * (s_coef * math.cos(phase) - c_coef * math.sin(phase)) / ph_at_zero(pm, t)

        return RealFunction(value, derivative, name)

    return component(c1, c2, "x"), component(d1, d2, "y")


def central_force_solve(cfg: CentralForceConfig, ts: Sequence[float]) -> Trajectory:
    """
    Positions and generalized velocities at the sample times.

    Returns:
        Trajectory with columns x, y, Dx, Dy
    """
    c1, c2, d1, d2 = cfg.constants
    k = cfg.k
    ts = np.asarray(ts, dtype=float)
    tau = tau_from_origin(cfg.pm, ts)
    sin, cos = np.sin(k * tau), np.cos(k * tau)
    states = np.column_stack(
        [
            c1 * sin + c2 * cos,
            d1 * sin + d2 * cos,
            k * (c1 * cos - c2 * sin),
            k * (d1 * cos - d2 * sin),
        ]
    )
    logger.debug(f"Central force on {cfg.pm.label}: {ts.size} samples, k={k:g}")
    return Trajectory(ts, states, ("x", "y", "Dx", "Dy"), tau=tau, kind="central-force")


def ellipse_invariant(traj: Trajectory, constants: Constants) -> float:
    """max |(d1 x - c1 y)^2 + (d2 x - c2 y)^2 - (d1 c2 - c1 d2)^2| over the samples."""
    c1, c2, d1, d2 = constants
    x, y = traj.column("x"), traj.column("y")
    lhs = (d1 * x - c1 * y) ** 2 + (d2 * x - c2 * y) ** 2
    rhs = (d1 * c2 - c1 * d2) ** 2
    return float(np.max(np.abs(lhs - rhs)))


def central_force_residual(cfg: CentralForceConfig, ts: Sequence[float]) -> float:
    """
    max |m D^2 r + m k^2 r| over interior sample times, through gd_second.

    Raises:
        DerivativeError: If D^2 of a component cannot be evaluated at a sample
    """
    x, y = central_force_components(cfg)
    m, k2 = cfg.mass, cfg.k**2
    worst = 0.0
    for t in ts:
        for component in (x, y):
            value = m * gd_second(cfg.pm, component, float(t)) + m * k2 * component(t)
            worst = max(worst, abs(value))
    return worst
