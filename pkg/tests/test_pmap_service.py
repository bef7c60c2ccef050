"""
Tests for the p-map service: intervals, the catalog and the hypothesis checks.
"""
import math
from typing import get_args

import numpy as np
import pytest
from pydantic import ValidationError

from gencalc.core.errors import ConfigurationError, DomainError, PMapError
from gencalc.core.models import PMapFamilyName, PMapSpec
from gencalc.services.pmap_service import (
    DEFAULT_DOMAINS,
    Interval,
    PMap,
    PMapFamily,
    check_h2,
    check_hypotheses,
    is_time_reversible,
    make_builtin,
    make_weighted,
    neighbourhood_width,
    numeric_ph_at_zero,
    parse_family,
    ph_at_zero,
    pmap_from_spec,
)


@pytest.mark.unit
class TestInterval:
    """Tests for Interval."""

    def test_open_ends_are_excluded(self):
        """Open ends are not contained, closed ends are."""
        interval = Interval(0.0, 1.0, open_lo=True)
        assert not interval.contains(0.0)
        assert interval.contains(1.0)
        assert interval.contains(0.5)
        assert str(interval) == "(0, 1]"

    def test_empty_interval_rejected(self):
        """lo must be strictly below hi."""
        with pytest.raises(ValueError):
            Interval(1.0, 1.0)

    def test_interior_samples_exclude_ends(self):
        """Samples are equally spaced and strictly inside."""
        samples = Interval(0.0, 1.0).interior_samples(3)
        np.testing.assert_allclose(samples, [0.25, 0.5, 0.75])

    def test_contains_all(self):
        """contains_all honors open ends on arrays."""
        interval = Interval(-1.0, 1.0, open_hi=True)
        assert interval.contains_all([-1.0, 0.0, 0.99])
        assert not interval.contains_all([0.0, 1.0])

    def test_clip_keeps_open_end_only_when_unchanged(self):
        """Clipping inside an open end closes it."""
        clipped = Interval(0.0, 2.0, open_lo=True).clip(-1.0, 1.0)
        assert clipped.as_tuple() == (0.0, 1.0)
        assert clipped.open_lo
        assert not clipped.open_hi


@pytest.mark.unit
class TestCatalog:
    """Tests for the built-in p-map families."""

    @pytest.mark.parametrize("family", [f.value for f in PMapFamily])
    def test_parse_family(self, family):
        """Every enum value resolves to its family."""
        assert parse_family(family).value == family

    def test_unknown_family(self):
        """Unknown families are reported with the list of available ones."""
        with pytest.raises(PMapError, match="Available families"):
            make_builtin("hyperbolic")

    def test_fractional_family_needs_alpha(self):
        """khalil without alpha is rejected."""
        with pytest.raises(PMapError):
            make_builtin("khalil")

    @pytest.mark.parametrize("alpha", [0.0, -0.5, 1.5])
    def test_alpha_out_of_range(self, alpha):
        """alpha must lie in (0, 1]."""
        with pytest.raises(PMapError):
            make_builtin("katugampola", alpha)

    def test_positive_family_rejects_zero(self):
        """khalil is only defined for t > 0."""
        with pytest.raises(PMapError):
            make_builtin("khalil", 0.5, Interval(0.0, 1.0))

    def test_default_domains(self, khalil, classical):
        """Families fall back to their default domains."""
        assert khalil.domain == DEFAULT_DOMAINS[PMapFamily.KHALIL]
        assert classical.domain.as_tuple() == (-1.0, 1.0)

    def test_labels(self, khalil, classical):
        """Labels carry the fractional order."""
        assert khalil.label == "khalil(alpha=0.5)"
        assert classical.label == "classical"

    @pytest.mark.parametrize(
        "family,alpha,t,h,expected",
        [
            ("classical", None, 0.3, 0.1, 0.4),
            ("khalil", 0.5, 0.25, 0.1, 0.25 + 0.1 * 0.5),
            ("katugampola", 0.5, 0.25, 0.1, 0.25 * math.exp(0.2)),
            ("symmetric_abs", 0.5, -0.25, 0.1, -0.25 + 0.5 * 0.1),
            ("sign_map", None, -0.5, 0.1, -0.6),
            ("quadratic", None, 0.5, 0.1, 0.51),
            ("cubic", None, 0.5, 0.1, 0.501),
        ],
    )
    def test_evaluate(self, family, alpha, t, h, expected):
        """p(t, h) matches its closed form."""
        assert make_builtin(family, alpha)(t, h) == pytest.approx(expected)

    @pytest.mark.parametrize(
        "family,alpha,t,expected",
        [
            ("classical", None, 0.3, 1.0),
            ("khalil", 0.5, 0.25, 0.5),
            ("katugampola", 0.5, 0.25, 0.5),
            ("symmetric_abs", 0.5, -0.25, 0.5),
            ("sign_map", None, -0.5, -1.0),
            ("quadratic", None, 0.5, 0.0),
        ],
    )
    def test_ph_at_zero(self, family, alpha, t, expected):
        """Analytic p_h(t, 0)."""
        assert ph_at_zero(make_builtin(family, alpha), t) == pytest.approx(expected)

    def test_ph_outside_domain(self, khalil):
        """p_h is only evaluated inside the domain."""
        with pytest.raises(DomainError):
            ph_at_zero(khalil, -0.5)

    def test_numeric_ph_fallback(self):
        """Maps without an analytic p_h use a converged central difference."""
        pm = PMap(
            label="custom", evaluate=lambda t, h: t + h * (1.0 + t * t), domain=Interval(-1, 1)
        )
        assert not pm.has_analytic_ph
        assert ph_at_zero(pm, 0.5) == pytest.approx(1.25, rel=1e-8)
        assert numeric_ph_at_zero(pm, -0.5) == pytest.approx(1.25, rel=1e-8)

    def test_tau_from_antiderivative(self, khalil):
        """tau(t) = int dt / p_h = 2 (sqrt(t) - sqrt(origin)) for khalil 1/2."""
        assert khalil.tau(0.81, 0.25) == pytest.approx(2.0 * (0.9 - 0.5))

    def test_tau_without_antiderivative(self, quadratic):
        """Maps with p_h = 0 carry no antiderivative."""
        with pytest.raises(ValueError):
            quadratic.tau(0.5, 0.0)

    def test_make_weighted(self):
        """p = t + h w(t) has p_h = w."""
        pm = make_weighted(lambda t: 2.0 + t, Interval(0.0, 1.0), label="w")
        assert pm(0.5, 0.1) == pytest.approx(0.75)
        assert ph_at_zero(pm, 0.5) == pytest.approx(2.5)

    def test_time_reversibility(self, symmetric_abs):
        """|t|-weights are time reversible, sign weights are not."""
        ts = [0.1, 0.5, 0.9]
        assert is_time_reversible(symmetric_abs, ts)
        assert not is_time_reversible(make_builtin("sign_map"), ts)

    def test_pmap_from_spec(self):
        """Run-config descriptors build catalog maps."""
        pm = pmap_from_spec(PMapSpec(family="khalil", alpha=0.3, domain=(0.0, 2.0), open_lo=True))
        assert pm.domain.as_tuple() == (0.0, 2.0)
        assert pm.alpha == 0.3

    def test_pmap_from_spec_empty_domain(self):
        """An empty domain is a p-map error."""
        with pytest.raises(PMapError):
            pmap_from_spec(PMapSpec(family="classical", domain=(1.0, 0.0)))

    def test_spec_families_match_catalog(self):
        """The descriptor accepts exactly the catalog families."""
        assert set(get_args(PMapFamilyName)) == {f.value for f in PMapFamily}

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"family": "hyperbolic"},
            {"family": "khalil", "alpha": 1.5},
            {"family": "khalil", "alpha": 0.0},
            {"family": "katugampola", "alpha": -0.5},
        ],
    )
    def test_spec_rejects_unknown_family_and_alpha(self, kwargs):
        """Families outside the catalog and alpha outside (0, 1] fail validation."""
        with pytest.raises(ValidationError):
            PMapSpec(**kwargs)


@pytest.mark.unit
class TestHypotheses:
    """Tests for the H1+-, H2 and continuity checks."""

    def test_neighbourhood_width(self, khalil):
        """delta is half the distance to the nearest end, at most 1/2."""
        assert neighbourhood_width(khalil, 0.9) == pytest.approx(0.05)
        assert neighbourhood_width(make_builtin("classical", domain=Interval(-5, 5)), 0.0) == 0.5

    @pytest.mark.parametrize(
        "family,alpha,integral",
        [("classical", None, 2.0), ("khalil", 0.5, 2.0), ("katugampola", 0.5, 2.0)],
    )
    def test_regular_maps_satisfy_all(self, family, alpha, integral):
        """Catalog maps with p_h > 0 satisfy every hypothesis."""
        report = check_hypotheses(make_builtin(family, alpha))
        assert report.h1_plus and report.h1_minus
        assert report.h2
        assert report.continuity_at_zero
        assert report.failures == []
        assert report.h2_integral == pytest.approx(integral, rel=1e-4)
        assert report.ratio_condition == "assumed"

    def test_evidence_records_shrinking_h(self, khalil):
        """Each (t, eps) solve is recorded with its solution."""
        report = check_hypotheses(khalil, [0.5], [1e-2, 1e-4])
        assert len(report.h1_plus_evidence) == 2
        first, second = report.h1_plus_evidence
        assert first.h == pytest.approx(1e-2 / math.sqrt(0.5), rel=1e-6)
        assert second.abs_h < first.abs_h
        assert second.inside_delta

    def test_symmetric_abs_h2_across_singular_point(self, symmetric_abs):
        """|t|^(-1/2) is integrable on [-1, 1] when split at 0."""
        ok, value, message = check_h2(symmetric_abs)
        assert ok
        assert message == ""
        assert value == pytest.approx(4.0, rel=1e-4)

    def test_quadratic_fails_h1_minus_and_h2(self, quadratic):
        """t + h^2 = t - eps has no solution and 1 / p_h is not integrable."""
        report = check_hypotheses(quadratic, [0.0])
        assert not report.h1_minus
        assert not report.h2
        assert any("h1_minus" in failure for failure in report.failures)

    def test_constant_map_has_no_solution(self):
        """p(t, h) = t never reaches t + eps."""
        pm = make_weighted(lambda t: np.zeros_like(np.asarray(t, float))[()], Interval(-1, 1))
        report = check_hypotheses(pm, [0.0])
        assert not report.h1_plus
        assert not report.h1_minus
        assert any("has no solution" in failure for failure in report.failures)

    def test_exponential_shift_does_not_tend_to_zero(self):
        """p(t, h) = t + e^h solves t + eps with h = log(eps), which diverges."""
        pm = PMap(label="exp_shift", evaluate=lambda t, h: t + np.exp(h), domain=Interval(-1, 1))
        report = check_hypotheses(pm, [0.0])
        assert not report.h1_plus
        assert any("does not tend to 0" in failure for failure in report.failures)

    def test_sample_outside_domain(self, khalil):
        """Samples must lie in the domain."""
        with pytest.raises(DomainError):
            check_hypotheses(khalil, [0.0])

    @pytest.mark.parametrize("eps_grid", [[], [1e-2, 1e-1], [1e-1, -1e-2]])
    def test_invalid_eps_grid(self, khalil, eps_grid):
        """eps_grid must be positive and strictly decreasing."""
        with pytest.raises(ConfigurationError):
            check_hypotheses(khalil, [0.5], eps_grid)
