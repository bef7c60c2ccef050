"""
Fall with quadratic drag in fractional time.

Classically m v' = m g - (C rho A / 2) v^2 with terminal velocity
V = sqrt(2 m g / (C rho A)). The generalized profile
    v(t) = V tanh(c (alpha + t^alpha)),  c = sqrt(2) sigma^(1-alpha) / (2 alpha m) sqrt(g C rho A m)
solves p_h v' = g for
    p_h(t, 0) = t^(1-alpha) sigma^(alpha-1) cosh^2(c (alpha + t^alpha)).
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from gencalc.core.config import settings
from gencalc.core.errors import IntegrationError, MechanicsError
from gencalc.core.models import DragSpec
from gencalc.services.mechanics_service.base import Trajectory
from gencalc.services.pmap_service import Interval, PMap, make_weighted
from gencalc.utils.quadrature import require_integral

logger = logging.getLogger(__name__)

SATURATION_ARGUMENT = 20.0
TAIL_ARGUMENT = 40.0
_LN2 = math.log(2.0)


def _log_cosh(x):
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - _LN2


def _sech2(x):
    e = np.exp(-2.0 * np.abs(x))
    return 4.0 * e / (1.0 + e) ** 2


@dataclass(frozen=True)
class DragConfig:
    """Parameters of the drag problem; all positive, alpha in (0, 1)."""

    m: float = 1.0
    g: float = 9.8
    C: float = 1.0
    rho: float = 1.0
    A: float = 1.0
    alpha: float = 0.5
    sigma: Optional[float] = None

    def __post_init__(self):
        for name in ("m", "g", "C", "rho", "A"):
            if not getattr(self, name) > 0.0:
                raise MechanicsError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.alpha < 1.0:
            raise MechanicsError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.sigma is None:
            object.__setattr__(self, "sigma", settings.SIGMA)
        elif not self.sigma > 0.0:
            raise MechanicsError(f"sigma must be positive, got {self.sigma}")

    @classmethod
    def from_spec(cls, spec: DragSpec) -> "DragConfig":
        return cls(spec.m, spec.g, spec.C, spec.rho, spec.A, spec.alpha, spec.sigma)

    @property
    def terminal_velocity(self) -> float:
        return math.sqrt(2.0 * self.m * self.g / (self.C * self.rho * self.A))

    @property
    def rate(self) -> float:
        """The constant c of the tanh profile."""
        a = self.alpha
        return (
            math.sqrt(2.0)
            * self.sigma ** (1.0 - a)
            / (2.0 * a * self.m)
            * math.sqrt(self.g * self.C * self.rho * self.A * self.m)
        )

    def argument(self, t):
        """c (alpha + t^alpha)."""
        return self.rate * (self.alpha + np.power(t, self.alpha))

    def velocity(self, t):
        return self.terminal_velocity * np.tanh(self.argument(t))

    def ph(self, t):
        """p_h(t, 0, alpha) of the drag profile."""
        a = self.alpha
        log_ph = (1.0 - a) * np.log(t) + (a - 1.0) * math.log(self.sigma)
        return np.exp(log_ph + 2.0 * _log_cosh(self.argument(t)))

    def inv_ph(self, t):
        """1 / p_h, with sech^2 evaluated without overflow."""
        a = self.alpha
        return np.power(t, a - 1.0) * self.sigma ** (1.0 - a) * _sech2(self.argument(t))

    def residual(self, t):
        """|p_h v' - g| with cosh^2 of p_h cancelled against sech^2 of v' before multiplying."""
        a = self.alpha
        t = np.asarray(t, dtype=float)
        ph_power = np.power(t, 1.0 - a) * self.sigma ** (a - 1.0)
        vprime_power = self.terminal_velocity * self.rate * a * np.power(t, a - 1.0)
        return np.abs(ph_power * vprime_power - self.g)

    def pmap(self, t_end: float) -> PMap:
        """The drag profile as a p-map p(t, h) = t + h p_h(t, 0) on (0, t_end]."""
        return make_weighted(
            self.ph,
            Interval(0.0, t_end, open_lo=True),
            label=f"drag(alpha={self.alpha:g})",
            alpha=self.alpha,
        )


def saturation_time(cfg: DragConfig, argument: float = SATURATION_ARGUMENT) -> float:
    """Time at which c (alpha + t^alpha) reaches argument; 0 if it already has."""
    base = argument / cfg.rate - cfg.alpha
    if base <= 0.0:
        return 0.0
    return base ** (1.0 / cfg.alpha)


def drag_solve(cfg: DragConfig, ts: Sequence[float]) -> Trajectory:
    """
    The fractional drag profile at the sample times.

    Returns:
        Trajectory with columns v, ph and residual (|p_h v' - g|)

    Raises:
        MechanicsError: If a sample time is not positive
    """
    ts = np.asarray(ts, dtype=float)
    if np.any(ts <= 0.0):
        raise MechanicsError("Drag samples need t > 0")
    states = np.column_stack([cfg.velocity(ts), cfg.ph(ts), cfg.residual(ts)])
    tau = cfg.sigma ** (1.0 - cfg.alpha) * (
        np.tanh(cfg.argument(ts)) - math.tanh(cfg.rate * cfg.alpha)
    ) / (cfg.rate * cfg.alpha)
    return Trajectory(ts, states, ("v", "ph", "residual"), tau=tau, kind="drag")


def drag_tail_velocity(cfg: DragConfig, t: float) -> float:
    """
    v(t) = V - g int_t^oo ds / p_h(s, 0), the tail cut where tanh has saturated.

    Raises:
        QuadratureError: If the tail integral does not converge
    """
    upper = saturation_time(cfg, TAIL_ARGUMENT)
    if t >= upper:
        return cfg.terminal_velocity
    marks = [saturation_time(cfg, x) for x in (1.0, 5.0, SATURATION_ARGUMENT)]

    def integrand(s: float) -> float:
        return float(cfg.inv_ph(s))

    tail = require_integral(integrand, t, upper, marks, "drag tail integral")
    return cfg.terminal_velocity - cfg.g * tail


def classical_drag_solve(cfg: DragConfig, ts: Sequence[float]) -> Trajectory:
    """
    m v' = m g - (C rho A / 2) v^2 from v(0) = V tanh(c alpha), with a Runge-Kutta solver.

    Raises:
        IntegrationError: If the solver fails
    """
    ts = np.asarray(ts, dtype=float)
    k = cfg.C * cfg.rho * cfg.A / (2.0 * cfg.m)
    v0 = cfg.terminal_velocity * math.tanh(cfg.rate * cfg.alpha)

    def rhs(_t, v):
        return [cfg.g - k * v[0] ** 2]

    t0 = min(0.0, float(ts[0]))
    sol = integrate.solve_ivp(
        rhs,
        (t0, float(ts[-1])),
        [v0],
        method="DOP853",
        t_eval=ts,
        rtol=settings.ODE_RTOL,
        atol=settings.ODE_ATOL,
    )
    if sol.status < 0:
        raise IntegrationError(f"Classical drag integration failed: {sol.message}")
    return Trajectory(ts, sol.y[0], ("v",), tau=ts.copy(), kind="classical-drag")
