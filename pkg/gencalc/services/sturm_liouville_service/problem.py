"""
Generalized Sturm-Liouville problems and their weighted classical form.

A problem -D(P Dy) + q y = lambda w y on [a, b], with Dy = p_h(t, 0) y' and
boundary conditions on the quasi-derivative u = P Dy,

    y(a) cos(mu) - u(a) sin(mu) = 0
    y(b) cos(nu) + u(b) sin(nu) = 0,

is the classical problem -(R y')' + Q y = lambda W y with R = P p_h,
Q = q / p_h and W = w / p_h.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

from gencalc.core.config import settings
from gencalc.core.errors import SLProblemError
from gencalc.core.models import SLRequest
from gencalc.services.derivative_service import RealFunction, constant, function_from_spec
from gencalc.services.pmap_service import (
    POSITIVE_FAMILIES,
    PMap,
    parse_family,
    ph_at_zero,
    pmap_from_spec,
)
from gencalc.utils.quadrature import integrate_checked

logger = logging.getLogger(__name__)

# Fraction of sample points allowed to hit a degenerate p_h before rejection
_DEGENERATE_FRACTION = 0.01
_SCAN_POINTS = 401

BOUNDARY_ANGLES = {"dirichlet": (0.0, 0.0), "neumann": (math.pi / 2, math.pi / 2)}


@dataclass(frozen=True)
class SLProblem:
    """A generalized Sturm-Liouville problem. Build it with make_problem."""

    pm: PMap
    a: float
    b: float
    P: RealFunction
    q: RealFunction
    w: RealFunction
    mu: float = 0.0
    nu: float = 0.0
    breakpoints: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def singular_points(self) -> Tuple[float, ...]:
        """Singular points of p_h strictly inside (a, b)."""
        return tuple(s for s in self.pm.singular_points if self.a < s < self.b)

    @property
    def split_points(self) -> Tuple[float, ...]:
        """Singular points and coefficient breakpoints, sorted."""
        return tuple(sorted(set(self.singular_points) | set(self.breakpoints)))

    @property
    def standard_form(self) -> bool:
        """Whether P = 1, q = 0 and w = 1."""
        return (
            self.P.constant_value == 1.0
            and self.q.constant_value == 0.0
            and self.w.constant_value == 1.0
        )

    def ph(self, t: float) -> float:
        return ph_at_zero(self.pm, t)

    def inv_R(self, t: float) -> float:
        """1 / (P p_h)."""
        return 1.0 / (float(self.P(t)) * self.ph(t))

    def Q(self, t: float) -> float:
        return float(self.q(t)) / self.ph(t)

    def W(self, t: float) -> float:
        return float(self.w(t)) / self.ph(t)


@dataclass(frozen=True)
class WeightedClassical:
    """Coefficients of -(R y')' + Q y = lambda W y with conditions on u = R y'."""

    R: RealFunction
    Q: RealFunction
    W: RealFunction
    a: float
    b: float
    mu: float
    nu: float


def _check_angle(name: str, value: float) -> float:
    if not 0.0 <= value < math.pi:
        raise SLProblemError(
            f"Boundary angle {name}={value} must lie in [0, pi)", details={name: value}
        )
    return float(value)


def _check_coefficients(prob: SLProblem) -> None:
    """Reject degenerate p_h and non-integrable coefficients."""
    ts = np.linspace(prob.a, prob.b, _SCAN_POINTS + 2)[1:-1]
    ts = ts[~np.isin(ts, prob.split_points)]
    with np.errstate(all="ignore"):
        ph = np.array([prob.ph(t) for t in ts])
    infinite = ~np.isfinite(ph)
    if infinite.mean() > _DEGENERATE_FRACTION:
        raise SLProblemError(
            f"1/p_h vanishes on a set of positive measure for {prob.pm.label}",
            details={"fraction": float(infinite.mean())},
        )
    zero = ph == 0.0
    if zero.mean() > _DEGENERATE_FRACTION:
        raise SLProblemError(
            f"p_h(., 0) vanishes on a set of positive measure for {prob.pm.label}; "
            "the problem has no weighted classical form",
            details={"fraction": float(zero.mean())},
        )

    for name, coefficient in (("1/(P p_h)", prob.inv_R), ("q/p_h", prob.Q), ("w/p_h", prob.W)):

        def integrand(s, c=coefficient):
            with np.errstate(all="ignore"):
                return abs(c(s))

        result = integrate_checked(
            integrand, prob.a, prob.b, prob.split_points, settings.QUAD_REFINE_RTOL
        )
        if not result.converged:
            raise SLProblemError(
                f"{name} is not integrable on [{prob.a:g}, {prob.b:g}]",
                details={"coefficient": name, "message": result.message},
            )


def make_problem(
    pm: PMap,
    a: float,
    b: float,
    P: Optional[RealFunction] = None,
    q: Optional[RealFunction] = None,
    w: Optional[RealFunction] = None,
    mu: float = 0.0,
    nu: float = 0.0,
    breakpoints: Iterable[float] = (),
) -> SLProblem:
    """
    Validate and build a Sturm-Liouville problem.

    Args:
        pm: The p-map; [a, b] must lie in the closure of its domain
        a: Left end
        b: Right end
        P: Leading coefficient, 1 when omitted
        q: Potential, 0 when omitted
        w: Weight, 1 when omitted; may change sign
        mu: Boundary angle at a in [0, pi)
        nu: Boundary angle at b in [0, pi)
        breakpoints: Interior points where a coefficient jumps

    Raises:
        SLProblemError: On an invalid interval or angle, a degenerate p_h or a
            non-integrable coefficient
    """
    if not a < b:
        raise SLProblemError(f"Empty interval [{a}, {b}]", details={"a": a, "b": b})
    if a < pm.domain.lo or b > pm.domain.hi:
        raise SLProblemError(
            f"[{a:g}, {b:g}] is not inside the domain {pm.domain} of {pm.label}",
            details={"a": a, "b": b, "domain": pm.domain.as_tuple()},
        )
    prob = SLProblem(
        pm=pm,
        a=float(a),
        b=float(b),
        P=P if P is not None else constant(1.0),
        q=q if q is not None else constant(0.0),
        w=w if w is not None else constant(1.0),
        mu=_check_angle("mu", mu),
        nu=_check_angle("nu", nu),
        breakpoints=tuple(sorted({float(x) for x in breakpoints if a < x < b})),
    )
    _check_coefficients(prob)
    logger.debug(f"Built SL problem for {pm.label} on [{a:g}, {b:g}]")
    return prob


def problem_from_request(request: SLRequest) -> SLProblem:
    """
    Build a problem from the sl run configuration.

    Without an explicit domain the p-map lives on the problem interval, open at
    t = 0 for the families defined only for t > 0.
    """
    spec = request.pmap
    if spec.domain is None:
        a, b = request.interval
        positive = parse_family(spec.family) in POSITIVE_FAMILIES
        spec = spec.model_copy(update={"domain": (a, b), "open_lo": positive and a == 0.0})
    pm = pmap_from_spec(spec)
    if request.bc == "custom":
        mu, nu = request.mu, request.nu
    else:
        mu, nu = BOUNDARY_ANGLES[request.bc]
    return make_problem(
        pm,
        request.interval[0],
        request.interval[1],
        P=function_from_spec(request.P),
        q=function_from_spec(request.q),
        w=function_from_spec(request.w),
        mu=mu,
        nu=nu,
        breakpoints=request.breakpoints,
    )


def to_classical(prob: SLProblem) -> WeightedClassical:
    """The weighted classical coefficients (P p_h, q / p_h, w / p_h)."""
    ph = RealFunction(prob.ph, label="p_h")
    return WeightedClassical(
        R=prob.P * ph,
        Q=prob.q / ph,
        W=prob.w / ph,
        a=prob.a,
        b=prob.b,
        mu=prob.mu,
        nu=prob.nu,
    )
