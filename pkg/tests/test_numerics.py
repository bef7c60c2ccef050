"""
Tests for the numerical utilities: Richardson tables, quadrature and roots.
"""
import math

import numpy as np
import pytest

from gencalc.core.errors import NonConvergenceError, QuadratureError
from gencalc.utils.numerics import (
    central_derivative,
    converged_central_derivative,
    one_sided_derivative,
    one_sided_quotient_steps,
    richardson_extrapolate,
    richardson_table,
)
from gencalc.utils.quadrature import (
    cumulative_integral,
    graded_nodes,
    integrate_checked,
    integrate_split,
    require_integral,
    split_points,
)
from gencalc.utils.roots import geometric_grid, root_nearest, sign_change_brackets


@pytest.mark.unit
class TestRichardson:
    """Tests for finite differences with Richardson extrapolation."""

    def test_linear_error_is_eliminated(self):
        """Quotients 1 + h at h = 1, 1/2, 1/4 extrapolate to 1."""
        table = richardson_table([2.0, 1.5, 1.25], power_step=1)
        assert table[1][1] == pytest.approx(1.0)
        assert table[2][2] == pytest.approx(1.0)

    def test_single_value_has_infinite_error(self):
        """One sample gives no error estimate."""
        assert richardson_extrapolate([3.0]) == (3.0, math.inf)

    def test_empty_input(self):
        """At least one sample is required."""
        with pytest.raises(ValueError):
            richardson_extrapolate([])

    def test_steps(self):
        """Steps halve from h0 with the requested sign."""
        np.testing.assert_allclose(one_sided_quotient_steps(0.1, 2, -1), [-0.1, -0.05, -0.025])

    @pytest.mark.parametrize("sign", [1, -1])
    def test_one_sided(self, sign):
        """One-sided derivative of exp at 0."""
        value, error = one_sided_derivative(math.exp, 0.0, 1e-2, 5, sign)
        assert value == pytest.approx(1.0, abs=1e-9)
        assert error < 1e-6

    def test_central(self):
        """Central derivative of sin at 1."""
        value, _ = central_derivative(math.sin, 1.0, 1e-2, 4)
        assert value == pytest.approx(math.cos(1.0), abs=1e-10)

    def test_converged_central(self):
        """Refinement stops once successive estimates agree."""
        value = converged_central_derivative(math.exp, 0.5, 1e-2, 1e-10, 1e-14)
        assert value == pytest.approx(math.exp(0.5), rel=1e-9)

    def test_converged_central_failure(self):
        """A non-differentiable function never settles."""
        with pytest.raises(NonConvergenceError):
            converged_central_derivative(lambda x: math.sqrt(max(x, 0.0)), 0.0, 1e-2, 1e-12, 0.0)


@pytest.mark.unit
class TestQuadrature:
    """Tests for the QUADPACK helpers."""

    def test_split_points(self):
        """Breakpoints outside (a, b) are dropped, duplicates removed."""
        assert split_points(0.0, 1.0, [0.5, 0.5, 2.0, 0.0]) == [0.0, 0.5, 1.0]

    def test_empty_interval(self):
        """a == b integrates to 0."""
        assert integrate_split(math.exp, 1.0, 1.0).value == 0.0

    def test_reversed_limits(self):
        """a > b flips the sign."""
        assert integrate_split(lambda s: 1.0, 1.0, 0.0).value == pytest.approx(-1.0)

    def test_endpoint_singularity(self):
        """int_0^1 s^(-1/2) ds = 2."""
        result = integrate_checked(lambda s: s**-0.5, 0.0, 1.0)
        assert result.converged
        assert result.value == pytest.approx(2.0, rel=1e-8)

    def test_interior_singularity_split(self):
        """int_-1^1 |s|^(-1/2) ds = 4 with a breakpoint at 0."""
        result = integrate_checked(lambda s: abs(s) ** -0.5, -1.0, 1.0, [0.0])
        assert result.converged
        assert result.value == pytest.approx(4.0, rel=1e-8)

    def test_singularity_just_outside_lower_limit(self):
        """int_eps^b s^(-0.7) ds matches the antiderivative although 0 lies just below eps."""
        eps, b = 1e-12, 0.05
        exact = (b**0.3 - eps**0.3) / 0.3
        result = integrate_split(lambda s: s**-0.7, eps, b)
        assert result.converged
        assert result.value == pytest.approx(exact, rel=1e-10)

    def test_singularity_just_outside_upper_limit(self):
        """The grading also applies to a breakpoint just beyond the upper limit."""
        eps = 1e-10
        exact = (1.0 - eps**0.5) / 0.5
        result = integrate_split(lambda s: abs(1.0 - s) ** -0.5, 0.0, 1.0 - eps, [1.0])
        assert result.value == pytest.approx(exact, rel=1e-10)

    def test_graded_nodes(self):
        """Nodes grow geometrically away from the anchor and keep both limits."""
        nodes = graded_nodes(1e-6, 1.0)
        assert nodes[0] == 1e-6 and nodes[-1] == 1.0
        np.testing.assert_allclose(nodes[1:-1], [1e-5, 1e-4, 1e-3, 1e-2, 1e-1], rtol=1e-12)
        assert graded_nodes(0.5, 1.0) == [0.5, 1.0]
        assert graded_nodes(0.0, 1.0) == [0.0, 1.0]

    def test_divergent_integral(self):
        """int_0^1 ds / s is rejected."""
        assert not integrate_checked(lambda s: 1.0 / s, 0.0, 1.0).converged
        with pytest.raises(QuadratureError):
            require_integral(lambda s: 1.0 / s, 0.0, 1.0, what="test integral")

    def test_cumulative(self):
        """Running integrals of 2s are s^2 - origin^2."""
        ts = np.array([0.5, 0.5, 1.0, 2.0])
        out = cumulative_integral(lambda s: 2.0 * s, ts, 0.0)
        np.testing.assert_allclose(out, ts**2, rtol=1e-12)

    def test_cumulative_from_origin_below_first_sample(self):
        """Running integrals of s^(-0.7) from 0 with the grid starting at 1e-12."""
        ts = np.concatenate([[1e-12], np.linspace(0.01, 1.0, 25)])
        out = cumulative_integral(lambda s: s**-0.7, ts, 0.0)
        np.testing.assert_allclose(out, ts**0.3 / 0.3, rtol=1e-10)

    def test_cumulative_rejects_points_before_origin(self):
        """ts must start at or after the origin."""
        with pytest.raises(ValueError):
            cumulative_integral(lambda s: 1.0, [-1.0, 0.0], 0.0)


@pytest.mark.unit
class TestRoots:
    """Tests for bracket scanning and root selection."""

    def test_brackets_and_exact_roots(self):
        """Sign changes and exact zeros are reported separately."""
        brackets, exact = sign_change_brackets(lambda x: x * x - 1.0, [-2.0, 0.0, 1.0, 3.0])
        assert brackets == [(-2.0, 0.0)]
        assert exact == [1.0]

    def test_non_finite_values_skip_pairs(self):
        """Pairs touching a non-finite value are skipped."""
        brackets, _ = sign_change_brackets(lambda x: 1.0 / x, [-1.0, 0.0, 1.0])
        assert brackets == []

    def test_root_nearest_target(self):
        """The root closest to the target wins."""
        grid = np.linspace(-3.0, 3.0, 61)
        root = root_nearest(lambda x: (x - 0.25) * (x + 2.05), grid, target=0.0)
        assert root == pytest.approx(0.25, abs=1e-12)

    def test_root_nearest_none(self):
        """No sign change and no zero gives None."""
        assert root_nearest(lambda x: x * x + 1.0, np.linspace(-1, 1, 11)) is None

    def test_geometric_grid(self):
        """Grid is symmetric, sorted and contains 0."""
        grid = geometric_grid(0.5, 3, wide_powers=2)
        expected = [-4, -2, -1, -0.5, -0.25, -0.125, -0.0625, 0]
        expected = sorted(expected + [-x for x in expected if x])
        np.testing.assert_allclose(grid, expected)
