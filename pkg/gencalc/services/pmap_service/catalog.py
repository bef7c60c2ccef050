"""
Catalog of concrete p-maps.

This module provides the factory for the built-in families and the evaluation
of p_h(t, 0) with a numerical fallback for maps that do not carry it.
"""
import logging
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from gencalc.core.config import settings
from gencalc.core.errors import DomainError, PMapError
from gencalc.core.models import PMapSpec
from gencalc.services.pmap_service.base import Interval, PMap, ScalarFunction
from gencalc.utils.numerics import converged_central_derivative

logger = logging.getLogger(__name__)


class PMapFamily(Enum):
    """Enum defining the built-in p-map families."""

    CLASSICAL = "classical"
    KHALIL = "khalil"
    KATUGAMPOLA = "katugampola"
    SYMMETRIC_ABS = "symmetric_abs"
    SIGN_MAP = "sign_map"
    QUADRATIC = "quadratic"
    CUBIC = "cubic"
    QUADRATIC_ALPHA = "quadratic_alpha"


FRACTIONAL_FAMILIES = {
    PMapFamily.KHALIL,
    PMapFamily.KATUGAMPOLA,
    PMapFamily.SYMMETRIC_ABS,
    PMapFamily.QUADRATIC_ALPHA,
}

POSITIVE_FAMILIES = {PMapFamily.KHALIL, PMapFamily.KATUGAMPOLA}

DEFAULT_DOMAINS = {
    PMapFamily.CLASSICAL: Interval(-1.0, 1.0),
    PMapFamily.KHALIL: Interval(0.0, 1.0, open_lo=True),
    PMapFamily.KATUGAMPOLA: Interval(0.0, 1.0, open_lo=True),
    PMapFamily.SYMMETRIC_ABS: Interval(-1.0, 1.0),
    PMapFamily.SIGN_MAP: Interval(-1.0, 1.0),
    PMapFamily.QUADRATIC: Interval(-1.0, 1.0),
    PMapFamily.CUBIC: Interval(-1.0, 1.0),
    PMapFamily.QUADRATIC_ALPHA: Interval(-1.0, 1.0),
}


def parse_family(name: Union[str, PMapFamily]) -> PMapFamily:
    """
    Resolve a family name.

    Raises:
        PMapError: If the name is not in the catalog
    """
    if isinstance(name, PMapFamily):
        return name
    try:
        return PMapFamily(name)
    except ValueError:
        available = [f.value for f in PMapFamily]
        raise PMapError(
            f"Invalid p-map family: {name}. Available families: {', '.join(available)}"
        ) from None


def _check_alpha(family: PMapFamily, alpha: Optional[float]) -> Optional[float]:
    if family not in FRACTIONAL_FAMILIES:
        if alpha is not None:
            logger.debug(f"alpha={alpha} ignored for {family.value}")
        return None
    if alpha is None:
        raise PMapError(f"{family.value} requires a fractional order alpha")
    if not 0.0 < alpha <= 1.0:
        raise PMapError(f"alpha must lie in (0, 1], got {alpha}", details={"alpha": alpha})
    return float(alpha)


def _check_domain(family: PMapFamily, domain: Interval) -> None:
    if family not in POSITIVE_FAMILIES:
        return
    if domain.lo < 0.0 or (domain.lo == 0.0 and not domain.open_lo):
        raise PMapError(
            f"{family.value} is only defined for t > 0; domain {domain} contains t = 0 or less",
            details={"domain": domain.as_tuple()},
        )


def make_builtin(
    name: Union[str, PMapFamily],
    alpha: Optional[float] = None,
    domain: Optional[Interval] = None,
) -> PMap:
    """
    Build a catalog p-map.

    Args:
        name: Family name (see PMapFamily)
        alpha: Fractional order, required by the fractional families
        domain: Working interval; a family default is used when omitted

    Returns:
        PMap with analytic p_h(t, 0) filled in

    Raises:
        PMapError: On an unknown family, invalid alpha or incompatible domain
    """
    family = parse_family(name)
    alpha = _check_alpha(family, alpha)
    domain = domain or DEFAULT_DOMAINS[family]
    _check_domain(family, domain)
    label = family.value if alpha is None else f"{family.value}(alpha={alpha:g})"

    evaluate: Callable[[float, float], float]
    ph_zero: ScalarFunction
    antiderivative: Optional[ScalarFunction] = None
    singular: tuple = ()

    if family is PMapFamily.CLASSICAL:

        def evaluate(t, h):
            return t + h

        def ph_zero(t):
            return np.ones_like(np.asarray(t, dtype=float))[()]

        def antiderivative(t):
            return np.asarray(t, dtype=float)[()]

    elif family is PMapFamily.KHALIL:
        a = alpha

        def evaluate(t, h):
            return t + h * np.power(t, 1.0 - a)

        def ph_zero(t):
            return np.power(t, 1.0 - a)

        def antiderivative(t):
            return np.power(t, a) / a

    elif family is PMapFamily.KATUGAMPOLA:
        a = alpha

        def evaluate(t, h):
            return t * np.exp(h * np.power(t, -a))

        def ph_zero(t):
            return np.power(t, 1.0 - a)

        def antiderivative(t):
            return np.power(t, a) / a

    elif family is PMapFamily.SYMMETRIC_ABS:
        a = alpha

        def evaluate(t, h):
            return t + np.power(np.abs(t), 1.0 - a) * h

        def ph_zero(t):
            return np.power(np.abs(t), 1.0 - a)

        def antiderivative(t):
            return np.sign(t) * np.power(np.abs(t), a) / a

        singular = (0.0,) if a < 1.0 else ()

    elif family is PMapFamily.SIGN_MAP:

        def evaluate(t, h):
            return t + np.sign(t) * h

        def ph_zero(t):
            return np.sign(t)

        def antiderivative(t):
            return np.abs(t)

        singular = (0.0,)

    elif family is PMapFamily.QUADRATIC:

        def evaluate(t, h):
            return t + h * h

        def ph_zero(t):
            return np.zeros_like(np.asarray(t, dtype=float))[()]

    elif family is PMapFamily.CUBIC:

        def evaluate(t, h):
            return t + h * h * h

        def ph_zero(t):
            return np.zeros_like(np.asarray(t, dtype=float))[()]

    else:  # QUADRATIC_ALPHA
        a = alpha

        def evaluate(t, h):
            return t + h * h * np.power(np.abs(t), 1.0 - a)

        def ph_zero(t):
            return np.zeros_like(np.asarray(t, dtype=float))[()]

    logger.debug(f"Created p-map {label} on {domain}")
    return PMap(
        label=label,
        evaluate=evaluate,
        domain=domain,
        ph_zero=ph_zero,
        alpha=alpha,
        family=family.value,
        inv_ph_antiderivative=antiderivative,
        singular_points=singular,
    )


def make_weighted(
    weight: ScalarFunction,
    domain: Interval,
    label: str = "weighted",
    inv_antiderivative: Optional[ScalarFunction] = None,
    singular_points: Iterable[float] = (),
    alpha: Optional[float] = None,
) -> PMap:
    """
    Build p(t, h) = t + h * weight(t), whose p_h(t, 0) is the weight itself.

    Any positive weight profile becomes a p-map this way, for example the drag
    profile p_h(t, 0, alpha) or coefficient experiments with p_h = 1.
    """

    def evaluate(t, h):
        return t + h * weight(t)

    return PMap(
        label=label,
        evaluate=evaluate,
        domain=domain,
        ph_zero=weight,
        alpha=alpha,
        family=None,
        inv_ph_antiderivative=inv_antiderivative,
        singular_points=tuple(singular_points),
    )


def numeric_ph_at_zero(pm: PMap, t: float) -> float:
    """
    p_h(t, 0) by Richardson-accelerated central differences in h.

    Raises:
        NonConvergenceError: If successive estimates never agree to PH_RTOL
    """
    h0 = settings.DERIV_BASE_STEP * max(1.0, abs(t))
    return converged_central_derivative(
        lambda h: float(pm.evaluate(t, h)), 0.0, h0, settings.PH_RTOL, settings.PH_ATOL
    )


def ph_at_zero(pm: PMap, t: float) -> float:
    """
    Weight p_h(t, 0) of the lift D_p f = p_h(t, 0) f'(t).

    Uses the analytic form when the p-map carries one, otherwise a converged
    central difference.

    Raises:
        DomainError: If t is outside the p-map domain
        NonConvergenceError: If the numerical fallback does not settle
    """
    if not pm.domain.contains(t):
        raise DomainError(f"t={t} lies outside the domain {pm.domain} of {pm.label}")
    if pm.ph_zero is not None:
        return float(pm.ph_zero(t))
    return numeric_ph_at_zero(pm, t)


def is_time_reversible(pm: PMap, sample_ts: Sequence[float], rtol: float = 1e-12) -> bool:
    """
    Whether p_h(t, 0) = p_h(-t, 0) on the sampled points.

    Raises:
        DomainError: If some -t falls outside the domain
    """
    for t in sample_ts:
        forward, backward = ph_at_zero(pm, t), ph_at_zero(pm, -t)
        if abs(forward - backward) > rtol * max(1.0, abs(forward)):
            logger.debug(f"{pm.label} is not time reversible at t={t}")
            return False
    return True


def pmap_from_spec(spec: PMapSpec) -> PMap:
    """
    Build a catalog p-map from its run-config descriptor.

    Raises:
        PMapError: On an unknown family, invalid alpha or incompatible domain
    """
    domain = None
    if spec.domain is not None:
        try:
            domain = Interval(spec.domain[0], spec.domain[1], spec.open_lo, spec.open_hi)
        except ValueError as e:
            raise PMapError(str(e), details={"domain": list(spec.domain)}) from None
    return make_builtin(spec.family, spec.alpha, domain)
