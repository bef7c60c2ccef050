"""
Calculus rules of the generalized derivative as numerical residuals.

Under H1+-, continuity at h = 0 and p-differentiability of f and g, D obeys the
sum, product and quotient rules and the chain rule D(g o f) = g'(f) Df. The
fractional "chain rule" D(g o f) = (Dg)(f) Df does not hold in general; its
residual is exposed separately.
"""
import logging
from typing import Optional

from gencalc.core.errors import DerivativeError, LiftInapplicableError
from gencalc.core.models import HypothesisReport, RuleResiduals
from gencalc.services.derivative_service.engine import first_derivative, gd_limit
from gencalc.services.derivative_service.functions import RealFunction
from gencalc.services.pmap_service import PMap, check_hypotheses

logger = logging.getLogger(__name__)

RULES = ("sum", "product", "quotient", "chain")


def rule_residuals(
    pm: PMap,
    f: RealFunction,
    g: RealFunction,
    t: float,
    report: Optional[HypothesisReport] = None,
    base_step: Optional[float] = None,
) -> RuleResiduals:
    """
    Residuals of the four rules at t, each side evaluated with gd_limit.

    Args:
        pm: The p-map
        f: First function
        g: Second function (denominator of the quotient, outer of the chain)
        t: Evaluation point
        report: Hypothesis report of pm; checked at t when omitted
        base_step: Optional h0 passed to gd_limit

    Returns:
        RuleResiduals; a rule whose precondition fails has residual None and an
        entry in violations
    """
    violations = {}
    if report is None:
        report = check_hypotheses(pm, [t])
    if not (report.h1_plus and report.h1_minus and report.continuity_at_zero):
        reason = "p-map fails H1+-/continuity: " + "; ".join(report.failures[:3])
        return RuleResiduals(violations={rule: reason for rule in RULES})

    df = gd_limit(pm, f, t, base_step)
    dg = gd_limit(pm, g, t, base_step)
    if not (df.differentiable and dg.differentiable):
        missing = f.label if not df.differentiable else g.label
        reason = f"{missing} is not p-differentiable at t={t}"
        return RuleResiduals(violations={rule: reason for rule in RULES})
    ft, gt = float(f(t)), float(g(t))

    def residual(name: str, combined: RealFunction, expected: float) -> Optional[float]:
        result = gd_limit(pm, combined, t, base_step)
        if not result.differentiable:
            violations[name] = f"{combined.label} is not p-differentiable at t={t}"
            return None
        return abs(result.value - expected)

    residuals = RuleResiduals()
    residuals.sum = residual("sum", f + g, df.value + dg.value)
    residuals.product = residual("product", f * g, ft * dg.value + gt * df.value)
    if abs(gt) <= 1e-14:
        violations["quotient"] = f"g(t) = 0 at t={t}"
    else:
        residuals.quotient = residual(
            "quotient", f / g, (gt * df.value - ft * dg.value) / (gt * gt)
        )
    try:
        outer, _ = first_derivative(g, ft)
        residuals.chain = residual("chain", g.compose(f), outer * df.value)
    except LiftInapplicableError:
        violations["chain"] = f"{g.label} is not differentiable at f(t)={ft:.6g}"
    residuals.violations = violations
    logger.debug(f"Rule residuals for {pm.label} at t={t}: {residuals.model_dump()}")
    return residuals


def wrong_chain_residual(
    pm: PMap, f: RealFunction, g: RealFunction, t: float, base_step: Optional[float] = None
) -> float:
    """
    |D(g o f)(t) - (Dg)(f(t)) Df(t)|, the gap left by the naive fractional chain rule.

    Raises:
        DomainError: If f(t) lies outside the p-map domain
        DerivativeError: If one of the derivatives does not exist
    """
    composite = gd_limit(pm, g.compose(f), t, base_step)
    df = gd_limit(pm, f, t, base_step)
    dg_at_f = gd_limit(pm, g, float(f(t)), base_step)
    if not (composite.differentiable and df.differentiable and dg_at_f.differentiable):
        raise DerivativeError(f"Naive chain rule is undefined at t={t}")
    return abs(composite.value - dg_at_f.value * df.value)
