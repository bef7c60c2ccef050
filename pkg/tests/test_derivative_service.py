"""
Tests for the derivative service.

Covers the limit-definition engine, the weighted classical lift, the composed
second-order operator and the calculus rule residuals.
"""
import math

import numpy as np
import pytest

from gencalc.core.errors import (
    ConfigurationError,
    DerivativeError,
    DomainError,
    LiftInapplicableError,
)
from gencalc.core.models import DerivativeMethod, DerivativeOutcome, FunctionSpec
from gencalc.services.derivative_service import (
    RULES,
    RealFunction,
    builtin_function,
    constant,
    first_derivative,
    function_from_spec,
    gd_lift,
    gd_limit,
    gd_second,
    rule_residuals,
    wrong_chain_residual,
)
from gencalc.services.pmap_service import Interval, make_builtin, make_weighted

TOL = 1e-6


@pytest.mark.unit
class TestFunctions:
    """Tests for RealFunction and the builtin catalog."""

    @pytest.mark.parametrize(
        "name,t,value,derivative",
        [
            ("identity", 0.3, 0.3, 1.0),
            ("square", 0.3, 0.09, 0.6),
            ("cube", 0.5, 0.125, 0.75),
            ("sin", 0.0, 0.0, 1.0),
            ("cos", 0.0, 1.0, 0.0),
            ("exp", 0.0, 1.0, 1.0),
            ("log", 1.0, 0.0, 1.0),
            ("abs", -2.0, 2.0, -1.0),
        ],
    )
    def test_builtin_values(self, name, t, value, derivative):
        """Builtins carry their analytic derivative."""
        f = builtin_function(name)
        assert float(f(t)) == pytest.approx(value)
        assert f.d(t) == pytest.approx(derivative)

    @pytest.mark.parametrize("name", ["abs", "sgn_right", "sgn_left"])
    def test_kinks_have_no_derivative(self, name):
        """The derivative is undefined at the kink."""
        assert builtin_function(name).d(0.0) is None

    def test_sign_conventions(self):
        """sgn_right(0) = 1 and sgn_left(0) = -1."""
        assert float(builtin_function("sgn_right")(0.0)) == 1.0
        assert float(builtin_function("sgn_left")(0.0)) == -1.0

    def test_unknown_builtin(self):
        """Unknown names are configuration errors."""
        with pytest.raises(ConfigurationError, match="Available functions"):
            builtin_function("tan")

    def test_constant(self):
        """Constants remember their value and have zero derivative."""
        c = constant(3.0)
        assert c.constant_value == 3.0
        assert float(c(0.7)) == 3.0
        assert c.d(0.7) == 0.0

    def test_function_from_spec(self):
        """scale * builtin(t - shift)."""
        f = function_from_spec(FunctionSpec(name="sin", scale=2.0, shift=0.5))
        assert float(f(0.7)) == pytest.approx(2.0 * math.sin(0.2))
        assert f.d(0.7) == pytest.approx(2.0 * math.cos(0.2))
        assert function_from_spec(FunctionSpec(value=4.0)).constant_value == 4.0

    def test_algebra_carries_derivatives(self):
        """Sum, product, quotient and composition propagate f'."""
        f, g = builtin_function("sin"), builtin_function("exp")
        t = 0.4
        assert (f + g).d(t) == pytest.approx(math.cos(t) + math.exp(t))
        assert (f * g).d(t) == pytest.approx(math.exp(t) * (math.sin(t) + math.cos(t)))
        assert (f / g).d(t) == pytest.approx(math.exp(-t) * (math.cos(t) - math.sin(t)))
        assert g.compose(f).d(t) == pytest.approx(math.exp(math.sin(t)) * math.cos(t))

    def test_unknown_derivative_propagates(self):
        """Combining with a function without f' drops the derivative."""
        f = RealFunction(np.sin)
        assert (f + builtin_function("exp")).derivative is None
        assert f.d(0.1) is None


@pytest.mark.unit
class TestGdLimit:
    """Tests for the limit-definition engine."""

    @pytest.mark.parametrize(
        "family,alpha,name,t,expected",
        [
            ("classical", None, "square", 0.3, 0.6),
            ("classical", None, "sin", -0.4, math.cos(-0.4)),
            ("khalil", 0.5, "square", 0.25, 0.25),
            ("khalil", 0.5, "exp", 0.64, 0.8 * math.exp(0.64)),
            ("katugampola", 0.5, "square", 0.25, 0.25),
            ("katugampola", 0.3, "sin", 0.5, 0.5**0.7 * math.cos(0.5)),
            ("symmetric_abs", 0.5, "cube", -0.25, 0.5 * 3 * 0.0625),
        ],
    )
    def test_matches_weighted_derivative(self, family, alpha, name, t, expected):
        """D_p f = p_h(t, 0) f'(t) for maps with p_h != 0."""
        result = gd_limit(make_builtin(family, alpha), builtin_function(name), t)
        assert result.differentiable
        assert result.method == DerivativeMethod.LIMIT
        assert result.one_sided is None
        assert result.value == pytest.approx(expected, abs=TOL)

    def test_one_sided_at_domain_end(self, classical):
        """At the right end only h < 0 stays in the domain."""
        result = gd_limit(classical, builtin_function("square"), 1.0)
        assert result.differentiable
        assert result.one_sided == "left"
        assert result.value == pytest.approx(2.0, abs=TOL)

    def test_abs_not_differentiable_at_zero(self, classical):
        """The two one-sided limits of |t| at 0 disagree."""
        result = gd_limit(classical, builtin_function("abs"), 0.0)
        assert not result.differentiable
        assert result.outcome == DerivativeOutcome.NOT_DIFFERENTIABLE
        assert result.value is None

    @pytest.mark.parametrize("family,alpha", [("quadratic", None), ("quadratic_alpha", 0.5)])
    @pytest.mark.parametrize("name", ["square", "sin", "exp"])
    def test_quadratic_maps_annihilate_smooth_functions(self, family, alpha, name):
        """Under p = t + h^2 |t|^(1-a) every smooth f has D f = 0."""
        result = gd_limit(make_builtin(family, alpha), builtin_function(name), 0.5)
        assert result.differentiable
        assert abs(result.value) < 1e-9

    def test_discontinuous_function_is_p_differentiable(self, quadratic):
        """sgn jumps at 0 yet D sgn(0) = 0 under p = t + h^2."""
        result = gd_limit(quadratic, builtin_function("sgn_right"), 0.0)
        assert result.differentiable
        assert result.value == 0.0

    def test_cubic_abs_at_zero(self, cubic):
        """|t| is p-differentiable at 0 under p = t + h^3."""
        result = gd_limit(cubic, builtin_function("abs"), 0.0)
        assert result.differentiable
        assert abs(result.value) < 1e-12

    def test_outside_domain(self, khalil):
        """Points outside the domain are rejected."""
        with pytest.raises(DomainError):
            gd_limit(khalil, builtin_function("square"), -0.1)

    def test_non_finite_value(self):
        """f(t) must be finite."""
        pm = make_builtin("classical", domain=Interval(0.0, 1.0))
        with pytest.raises(DerivativeError):
            gd_limit(pm, builtin_function("log"), 0.0)

    def test_explicit_step_and_depth(self, classical):
        """base_step and depth override the settings."""
        result = gd_limit(classical, builtin_function("sin"), 0.2, base_step=1e-2, depth=6)
        assert result.value == pytest.approx(math.cos(0.2), abs=TOL)


@pytest.mark.unit
class TestLiftAndSecond:
    """Tests for gd_lift, first_derivative and gd_second."""

    def test_lift(self, khalil):
        """gd_lift is p_h(t, 0) f'(t)."""
        result = gd_lift(khalil, builtin_function("sin"), 0.36)
        assert result.method == DerivativeMethod.LIFT
        assert result.value == pytest.approx(0.6 * math.cos(0.36))

    def test_lift_needs_classical_derivative(self, cubic):
        """|t| has no lift at 0."""
        with pytest.raises(LiftInapplicableError):
            gd_lift(cubic, builtin_function("abs"), 0.0)

    def test_first_derivative_numeric(self):
        """Functions without f' fall back to matching one-sided limits."""
        value, error = first_derivative(RealFunction(np.sin), 0.3)
        assert value == pytest.approx(math.cos(0.3), abs=TOL)
        assert error < TOL

    def test_first_derivative_numeric_kink(self):
        """Disagreeing one-sided limits are reported."""
        with pytest.raises(LiftInapplicableError):
            first_derivative(RealFunction(np.abs), 0.0)

    def test_second_classical(self, classical):
        """D^2 sin = -sin for the classical map."""
        assert gd_second(classical, builtin_function("sin"), 0.3) == pytest.approx(
            -math.sin(0.3), abs=1e-5
        )

    def test_second_khalil(self, khalil):
        """t^(1/2) (t^(1/2) f')' = f'/2 + t f''; 3t for f = t^2."""
        assert gd_second(khalil, builtin_function("square"), 0.5) == pytest.approx(1.5, abs=1e-5)

    def test_second_rejects_singular_point(self, symmetric_abs):
        """p_h vanishes at 0 for symmetric_abs."""
        with pytest.raises(DerivativeError):
            gd_second(symmetric_abs, builtin_function("square"), 0.0)


@pytest.mark.unit
class TestRules:
    """Tests for the calculus rule residuals."""

    @pytest.mark.parametrize("family,alpha", [("khalil", 0.5), ("katugampola", 0.3)])
    @pytest.mark.parametrize("inner,outer", [("square", "exp"), ("sin", "cos"), ("cube", "exp")])
    def test_rules_hold(self, family, alpha, inner, outer):
        """All four residuals vanish under H1+- and continuity."""
        pm = make_builtin(family, alpha)
        residuals = rule_residuals(pm, builtin_function(inner), builtin_function(outer), 0.4)
        assert residuals.violations == {}
        for rule in RULES:
            assert getattr(residuals, rule) < TOL

    def test_quotient_needs_nonzero_denominator(self, classical):
        """g(t) = 0 is reported for the quotient rule only."""
        residuals = rule_residuals(
            classical, builtin_function("exp"), builtin_function("sin"), 0.0
        )
        assert set(residuals.violations) == {"quotient"}
        assert residuals.quotient is None
        assert residuals.sum < TOL

    def test_constant_map_violates_every_rule(self):
        """Without H1 no rule is checked."""
        pm = make_weighted(lambda t: np.zeros_like(np.asarray(t, float))[()], Interval(-1, 1))
        residuals = rule_residuals(pm, builtin_function("sin"), builtin_function("exp"), 0.0)
        assert set(residuals.violations) == set(RULES)

    def test_naive_chain_rule_fails(self, khalil):
        """(Dg)(f) Df misses D(g o f) by t^(1-a) - t^(2-2a)."""
        identity = builtin_function("identity")
        residual = wrong_chain_residual(khalil, identity, identity, 0.5)
        assert residual == pytest.approx(math.sqrt(0.5) - 0.5, abs=TOL)
