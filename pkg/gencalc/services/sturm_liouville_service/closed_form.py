"""
Closed-form solutions of D^2 y = -lambda y.

With tau(t) = int_a^t ds / p_h(s, 0) the equation -D^2 y = lambda y becomes
y'' = -lambda y in tau, so
    lambda > 0: y = A sin(k tau) + B cos(k tau),   k = sqrt(lambda)
    lambda < 0: y = A sinh(k tau) + B cosh(k tau), k = sqrt(-lambda)
    lambda = 0: y = A tau + B
Every branch returns y with its analytic derivative y' = Dy / p_h attached.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable

from gencalc.core.errors import SLProblemError
from gencalc.services.derivative_service import RealFunction
from gencalc.services.sturm_liouville_service.problem import SLProblem
from gencalc.utils.quadrature import require_integral

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClosedFormSolution:
    """y and its generalized derivative Dy = p_h y' on [a, b]."""

    y: RealFunction
    Dy: RealFunction
    tau: Callable[[float], float]
    lam: float


def _tau_function(prob: SLProblem) -> Callable[[float], float]:
    pm, a = prob.pm, prob.a
    if pm.inv_ph_antiderivative is not None:
        return lambda t: float(pm.tau(t, a))

    def inv_ph(s: float) -> float:
        return 1.0 / prob.ph(s)

    return lambda t: require_integral(inv_ph, a, t, prob.singular_points, "time change")


def _require_standard(prob: SLProblem) -> None:
    if not prob.standard_form:
        raise SLProblemError(
            "Closed-form solutions need P = 1, q = 0 and w = 1",
            details={"P": prob.P.label, "q": prob.q.label, "w": prob.w.label},
        )


def _assemble(prob: SLProblem, lam: float, value, generalized, label: str) -> ClosedFormSolution:
    tau = _tau_function(prob)

    def y(t):
        return value(tau(t))

    def dy(t):
        return generalized(tau(t))

    def yprime(t):
        return generalized(tau(t)) / prob.ph(t)

    return ClosedFormSolution(
        y=RealFunction(y, yprime, label),
        Dy=RealFunction(dy, label=f"D{label}"),
        tau=tau,
        lam=lam,
    )


def closed_form_solution(prob: SLProblem, lam: float, A: float, B: float) -> ClosedFormSolution:
    """
    Solution of -D^2 y = lambda y for lambda != 0 with amplitudes A, B.

    For lambda < 0 sqrt(lambda) is taken as i sqrt(-lambda), which gives the
    real hyperbolic pair.

    Raises:
        SLProblemError: If lambda = 0 (see linear_solution) or the problem is not
            in the form P = 1, q = 0, w = 1
    """
    _require_standard(prob)
    if lam == 0.0:
        raise SLProblemError(
            "lambda = 0 has the linear solution A tau + B; use linear_solution",
            details={"lambda": lam},
        )
    k = math.sqrt(abs(lam))
    if lam > 0:

        def value(s):
            return A * math.sin(k * s) + B * math.cos(k * s)

        def generalized(s):
            return k * (A * math.cos(k * s) - B * math.sin(k * s))

        label = f"y[sin,lambda={lam:g}]"
    else:

        def value(s):
            return A * math.sinh(k * s) + B * math.cosh(k * s)

        def generalized(s):
            return k * (A * math.cosh(k * s) + B * math.sinh(k * s))

        label = f"y[sinh,lambda={lam:g}]"
    return _assemble(prob, lam, value, generalized, label)


def linear_solution(prob: SLProblem, A: float, B: float) -> ClosedFormSolution:
    """The lambda = 0 branch y = A tau(t) + B, Dy = A."""
    _require_standard(prob)
    return _assemble(prob, 0.0, lambda s: A * s + B, lambda s: A, "y[linear]")


def variation_of_parameters(
    prob: SLProblem, lam: float, forcing: RealFunction
) -> ClosedFormSolution:
    """
    Solution of D^2 y = lambda y + f with y(a) = Dy(a) = 0, for lambda > 0.

    With k = sqrt(lambda),
        y(t)  = (1/k) int_a^t sinh(k (tau(t) - tau(s))) f(s) / p_h(s) ds
        Dy(t) =       int_a^t cosh(k (tau(t) - tau(s))) f(s) / p_h(s) ds

    Raises:
        SLProblemError: If lambda <= 0 or the problem is not in standard form
    """
    _require_standard(prob)
    if lam <= 0.0:
        raise SLProblemError("variation_of_parameters needs lambda > 0", details={"lambda": lam})
    k = math.sqrt(lam)
    tau = _tau_function(prob)
    points = prob.singular_points

    def kernel_integral(t: float, kernel) -> float:
        tau_t = tau(t)

        def integrand(s: float) -> float:
            return kernel(k * (tau_t - tau(s))) * float(forcing(s)) / prob.ph(s)

        return require_integral(integrand, prob.a, t, points, "variation of parameters")

    def y(t):
        return kernel_integral(float(t), math.sinh) / k

    def dy(t):
        return kernel_integral(float(t), math.cosh)

    def yprime(t):
        return dy(t) / prob.ph(t)

    logger.debug(f"Variation of parameters for lambda={lam:g}, f={forcing.label}")
    return ClosedFormSolution(
        y=RealFunction(y, yprime, f"y[vp,{forcing.label}]"),
        Dy=RealFunction(dy, label=f"Dy[vp,{forcing.label}]"),
        tau=tau,
        lam=lam,
    )
