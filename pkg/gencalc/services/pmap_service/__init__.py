"""
P-map service for gencalc.

This package defines the p-map abstraction, ships the catalog of concrete maps
and checks the solvability/integrability hypotheses numerically.
Classes:
    Interval: Working interval with optional open ends
    PMap: Immutable descriptor of a map p(t, h)
    PMapFamily: Enum of the built-in families
Functions:
    make_builtin: Factory for catalog maps
    make_weighted: p(t, h) = t + h * weight(t) for an arbitrary weight
    ph_at_zero: p_h(t, 0), analytic or numeric
    check_hypotheses: H1+, H1-, H2 and continuity report
"""
from .base import Interval, PMap
from .catalog import (
    DEFAULT_DOMAINS,
    FRACTIONAL_FAMILIES,
    POSITIVE_FAMILIES,
    PMapFamily,
    is_time_reversible,
    make_builtin,
    make_weighted,
    numeric_ph_at_zero,
    parse_family,
    ph_at_zero,
    pmap_from_spec,
)
from .hypotheses import DEFAULT_EPS_GRID, check_h2, check_hypotheses, neighbourhood_width

__all__ = [
    # Classes
    "Interval",
    "PMap",
    # Enums
    "PMapFamily",
    # Factory functions
    "make_builtin",
    "make_weighted",
    "parse_family",
    "pmap_from_spec",
    # Evaluation
    "ph_at_zero",
    "numeric_ph_at_zero",
    "is_time_reversible",
    # Hypotheses
    "check_hypotheses",
    "check_h2",
    "neighbourhood_width",
    "DEFAULT_EPS_GRID",
    "DEFAULT_DOMAINS",
    "FRACTIONAL_FAMILIES",
    "POSITIVE_FAMILIES",
]
