"""
Base types of the mechanics service.

Every simulation returns a Trajectory: sample times t, the slow time tau(t)
measured from the time origin 0, and a state matrix with labelled columns.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from gencalc.core.config import settings
from gencalc.core.errors import MechanicsError
from gencalc.core.models import PMapSpec
from gencalc.services.pmap_service import (
    FRACTIONAL_FAMILIES,
    POSITIVE_FAMILIES,
    Interval,
    PMap,
    PMapFamily,
    make_builtin,
    parse_family,
    ph_at_zero,
    pmap_from_spec,
)
from gencalc.utils.quadrature import cumulative_integral

logger = logging.getLogger(__name__)

TIME_ORIGIN = 0.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    Sampled motion.

    Attributes:
        t: Sample times, strictly increasing
        states: Matrix of shape (len(t), len(labels))
        labels: Column names of states
        tau: Slow time at t, when known
        kind: Simulation that produced the samples
    """

    t: np.ndarray
    states: np.ndarray
    labels: Tuple[str, ...]
    tau: Optional[np.ndarray] = None
    kind: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states[:, None]
        if t.ndim != 1 or t.size == 0:
            raise MechanicsError("Trajectory times must be a non-empty vector")
        if np.any(np.diff(t) <= 0.0):
            raise MechanicsError("Trajectory times must be strictly increasing")
        if states.shape != (t.size, len(self.labels)):
            raise MechanicsError(
                f"State matrix has shape {states.shape}, expected ({t.size}, {len(self.labels)})"
            )
        if self.tau is not None and np.shape(self.tau) != t.shape:
            raise MechanicsError("tau must have one entry per sample time")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.tau is not None:
            object.__setattr__(self, "tau", np.asarray(self.tau, dtype=float))

    def __len__(self) -> int:
        return int(self.t.size)

    def column(self, label: str) -> np.ndarray:
        """
        One state component.

        Raises:
            MechanicsError: If the label is unknown
        """
        try:
            return self.states[:, self.labels.index(label)]
        except ValueError:
            raise MechanicsError(
                f"Unknown state component {label!r}; available: {', '.join(self.labels)}"
            ) from None

    def columns(self) -> Dict[str, np.ndarray]:
        """t, tau (when present) and every state component, in CSV order."""
        out = {"t": self.t}
        if self.tau is not None:
            out["tau"] = self.tau
        for i, label in enumerate(self.labels):
            out[label] = self.states[:, i]
        return out


def mechanics_pmap(spec: Optional[PMapSpec], t_end: float) -> PMap:
    """
    The p-map of a simulation, on [0, t_end] unless the descriptor names a domain.

    The positive families are only defined for t > 0, so their default domain
    is open at 0.
    """
    if spec is None:
        return make_builtin(PMapFamily.CLASSICAL, domain=Interval(TIME_ORIGIN, t_end))
    if spec.domain is not None:
        return pmap_from_spec(spec)
    family = parse_family(spec.family)
    open_lo = family in POSITIVE_FAMILIES
    return make_builtin(family, spec.alpha, Interval(TIME_ORIGIN, t_end, open_lo=open_lo))


def start_time(pm: PMap) -> float:
    """First sample time: MECHANICS_EPSILON for fractional maps, 0 otherwise."""
    fractional = pm.family is not None and parse_family(pm.family) in FRACTIONAL_FAMILIES
    if fractional or not pm.domain.contains(TIME_ORIGIN):
        return settings.MECHANICS_EPSILON
    return TIME_ORIGIN


def sample_times(pm: PMap, t_end: float, samples: int) -> np.ndarray:
    """samples equally spaced times from start_time(pm) to t_end."""
    if t_end <= start_time(pm):
        raise MechanicsError(f"t_end={t_end} must exceed the start time {start_time(pm)}")
    return np.linspace(start_time(pm), t_end, samples)


def tau_from_origin(pm: PMap, ts: Sequence[float]) -> np.ndarray:
    """
    tau(t) = int_0^t ds / p_h(s, 0) at every t of a sorted sample.

    Raises:
        MechanicsError: If a sample precedes the time origin
        QuadratureError: If 1/p_h is not integrable from 0
    """
    ts = np.asarray(ts, dtype=float)
    if ts.size and ts[0] < TIME_ORIGIN:
        raise MechanicsError("Sample times must not precede the time origin 0")
    if pm.inv_ph_antiderivative is not None:
        return np.asarray(pm.tau(ts, TIME_ORIGIN), dtype=float)

    def integrand(s: float) -> float:
        return 1.0 / ph_at_zero(pm, s)

    return cumulative_integral(integrand, ts, TIME_ORIGIN, pm.singular_points, "slow time")
