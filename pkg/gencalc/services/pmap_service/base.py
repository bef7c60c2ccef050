"""
Base types of the p-map service.

A p-map p(t, h) defines the generalized derivative through the difference
quotient [f(p(t, h)) - f(t)] / h. PMap values are immutable; the fractional
order, when there is one, is baked into the evaluator at construction.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

ScalarMap = Callable[[float, float], float]
ScalarFunction = Callable[[float], float]


@dataclass(frozen=True)
class Interval:
    """A real interval whose ends may be excluded."""

    lo: float
    hi: float
    open_lo: bool = False
    open_hi: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"Empty interval: [{self.lo}, {self.hi}]")

    @property
    def finite(self) -> bool:
        """Whether both ends are finite."""
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def width(self) -> float:
        """Length of the interval."""
        return self.hi - self.lo

    def contains(self, t: float) -> bool:
        """Whether t lies in the interval, honoring open ends."""
        above = t > self.lo if self.open_lo else t >= self.lo
        below = t < self.hi if self.open_hi else t <= self.hi
        return bool(above and below)

    def contains_all(self, ts) -> bool:
        """Whether every value of an array-like lies in the interval."""
        ts = np.asarray(ts, dtype=float)
        above = ts > self.lo if self.open_lo else ts >= self.lo
        below = ts < self.hi if self.open_hi else ts <= self.hi
        return bool(np.all(above & below))

    def interior_samples(self, n: int) -> np.ndarray:
        """n equally spaced interior points (ends excluded)."""
        lo = self.lo if math.isfinite(self.lo) else -1.0
        hi = self.hi if math.isfinite(self.hi) else 1.0
        return np.linspace(lo, hi, n + 2)[1:-1]

    def clip(self, lo: float, hi: float) -> "Interval":
        """Intersection with [lo, hi]."""
        new_lo, new_hi = max(self.lo, lo), min(self.hi, hi)
        return Interval(
            new_lo,
            new_hi,
            open_lo=self.open_lo and new_lo == self.lo,
            open_hi=self.open_hi and new_hi == self.hi,
        )

    def as_tuple(self) -> Tuple[float, float]:
        """(lo, hi) pair."""
        return (self.lo, self.hi)

    def __str__(self) -> str:
        left = "(" if self.open_lo else "["
        right = ")" if self.open_hi else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


@dataclass(frozen=True)
class PMap:
    """
    Descriptor of a map p(t, h).

    Attributes:
        label: Identifier used in logs and results
        evaluate: p(t, h), numpy friendly where possible
        domain: Working interval I
        ph_zero: Analytic p_h(t, 0) when known
        alpha: Fractional order, if the family has one
        family: Catalog family name, None for custom maps
        inv_ph_antiderivative: An antiderivative of 1 / p_h(., 0) when known
        singular_points: Interior points where p_h(., 0) vanishes or blows up
    """

    label: str
    evaluate: ScalarMap
    domain: Interval
    ph_zero: Optional[ScalarFunction] = None
    alpha: Optional[float] = None
    family: Optional[str] = None
    inv_ph_antiderivative: Optional[ScalarFunction] = None
    singular_points: Tuple[float, ...] = field(default_factory=tuple)

    def __call__(self, t: float, h: float) -> float:
        return self.evaluate(t, h)

    @property
    def has_analytic_ph(self) -> bool:
        """Whether p_h(t, 0) is known in closed form."""
        return self.ph_zero is not None

    def tau(self, t, origin: float):
        """int_origin^t ds / p_h(s, 0) from the known antiderivative."""
        if self.inv_ph_antiderivative is None:
            raise ValueError(f"{self.label} has no known antiderivative of 1/p_h")
        return self.inv_ph_antiderivative(t) - self.inv_ph_antiderivative(origin)
