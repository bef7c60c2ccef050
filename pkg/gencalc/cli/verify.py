"""
Verification fixtures.

Each fixture is a named check with a known answer: calculus rules, the
counterexample maps, spectrum oracles, mechanics invariants and the unit
conversions. A fixture returns its metrics and a list of failure messages; it
passes when the list is empty.
"""
import logging
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from gencalc.core.config import settings
from gencalc.core.errors import ConfigurationError, LiftInapplicableError
from gencalc.core.logging import get_metrics_logger
from gencalc.core.models import FixtureResult, NBodySpec, PMapSpec, VerifyReport
from gencalc.core.monitoring import PerformanceMonitoringContext
from gencalc.services.derivative_service import (
    builtin_function,
    first_derivative,
    gd_lift,
    gd_limit,
    rule_residuals,
    wrong_chain_residual,
)
from gencalc.services.mechanics_service import (
    CentralForceConfig,
    DragConfig,
    NBodySystem,
    central_force_solve,
    drag_tail_velocity,
    ellipse_invariant,
    gravity_solve,
    mechanics_pmap,
    nbody_integrate,
    sample_times,
    saturation_time,
)
from gencalc.services.pmap_service import (
    Interval,
    PMap,
    check_hypotheses,
    make_builtin,
    make_weighted,
)
from gencalc.services.sturm_liouville_service import (
    PruferShooter,
    asymptotic_estimate,
    degenerate_check,
    make_problem,
    shoot_eigenvalues,
)
from gencalc.services.units_service import (
    convert_acceleration,
    convert_velocity,
    gravity_term_dimensions,
)

logger = logging.getLogger(__name__)

Check = Tuple[Dict[str, float], List[str]]
Fixture = Callable[[np.random.Generator], Check]

FIXTURES: Dict[str, Fixture] = {}

DERIVATIVE_TOL = 1e-6


def fixture(name: str) -> Callable[[Fixture], Fixture]:
    """Register a fixture under name; the suite runs them in registration order."""

    def decorator(func: Fixture) -> Fixture:
        FIXTURES[name] = func
        return func

    return decorator


def _below(failures: List[str], label: str, value: float, limit: float) -> None:
    if not value < limit:
        failures.append(f"{label} = {value:.3g}, expected < {limit:g}")


def _relative(value: float, expected: float) -> float:
    return abs(value - expected) / abs(expected)


# Calculus


@fixture("lift_equivalence")
def lift_equivalence(rng: np.random.Generator) -> Check:
    """gd_limit agrees with the lift p_h f' on every map with p_h != 0."""
    maps = [
        make_builtin("classical"),
        make_builtin("khalil", 0.5),
        make_builtin("katugampola", 0.5),
        make_builtin("symmetric_abs", 0.5),
    ]
    worst, failures = 0.0, []
    for pm in maps:
        for name in ("square", "sin", "exp"):
            f = builtin_function(name)
            for t in pm.domain.interior_samples(50):
                limit = gd_limit(pm, f, float(t))
                if not limit.differentiable:
                    failures.append(f"{name} not p-differentiable under {pm.label} at t={t:.4g}")
                    continue
                worst = max(worst, abs(limit.value - gd_lift(pm, f, float(t)).value))
    _below(failures, "max |gd_limit - gd_lift|", worst, DERIVATIVE_TOL)
    return {"max_difference": worst}, failures


@fixture("calculus_rules")
def calculus_rules(rng: np.random.Generator) -> Check:
    """Sum, product, quotient and chain rules on 100 random (f, g, t)."""
    maps = [
        make_builtin("khalil", 0.5),
        make_builtin("khalil", 0.8),
        make_builtin("katugampola", 0.5),
        make_builtin("katugampola", 0.3),
    ]
    reports = [check_hypotheses(pm) for pm in maps]
    inner = ("identity", "square", "cube", "sin", "exp")
    outer = ("exp", "cos")
    worst, failures = 0.0, []
    for _ in range(100):
        k = int(rng.integers(len(maps)))
        f = builtin_function(inner[int(rng.integers(len(inner)))])
        g = builtin_function(outer[int(rng.integers(len(outer)))])
        t = float(rng.uniform(0.1, 0.9))
        residuals = rule_residuals(maps[k], f, g, t, reports[k])
        if residuals.violations:
            failures.append(
                f"{maps[k].label}, {f.label}, {g.label}, t={t:.4g}: {residuals.violations}"
            )
            continue
        values = [residuals.sum, residuals.product, residuals.quotient, residuals.chain]
        worst = max(worst, max(v for v in values if v is not None))
    _below(failures, "max rule residual", worst, DERIVATIVE_TOL)
    return {"max_residual": worst}, failures


@fixture("wrong_chain_rule")
def wrong_chain_rule(rng: np.random.Generator) -> Check:
    """The naive fractional chain rule leaves |t^(1-a) - t^(2-2a)| at t = 0.5, a = 0.5."""
    pm = make_builtin("khalil", 0.5)
    identity = builtin_function("identity")
    residual = wrong_chain_residual(pm, identity, identity, 0.5)
    expected = math.sqrt(0.5) - 0.5
    failures = []
    if residual < 0.01:
        failures.append(f"naive chain residual {residual:.3g} should be at least 0.01")
    _below(failures, "|residual - (sqrt(0.5) - 0.5)|", abs(residual - expected), DERIVATIVE_TOL)
    return {"residual": residual}, failures


@fixture("quadratic_zero_derivative")
def quadratic_zero_derivative(rng: np.random.Generator) -> Check:
    """Under p = t + h^2 (and t + h^2 |t|^(1-a)) every smooth f has D f = 0."""
    maps = [make_builtin("quadratic"), make_builtin("quadratic_alpha", 0.5)]
    worst, failures = 0.0, []
    for pm in maps:
        for name in ("square", "sin", "exp"):
            f = builtin_function(name)
            for t in pm.domain.interior_samples(9):
                result = gd_limit(pm, f, float(t))
                if not result.differentiable:
                    failures.append(f"{name} not p-differentiable under {pm.label} at t={t:.4g}")
                    continue
                worst = max(worst, abs(result.value))
    _below(failures, "max |D f|", worst, 1e-9)
    return {"max_derivative": worst}, failures


@fixture("discontinuous_p_differentiable")
def discontinuous_p_differentiable(rng: np.random.Generator) -> Check:
    """sgn with f(0) = 1 is p-differentiable at 0 under p = t + h^2 yet jumps there."""
    pm = make_builtin("quadratic")
    f = builtin_function("sgn_right")
    result = gd_limit(pm, f, 0.0)
    failures = []
    if not result.differentiable or result.value != 0.0:
        failures.append(f"expected D sgn(0) = 0, got {result.value} ({result.outcome.value})")
    jump = abs(float(f(1e-12)) - float(f(-1e-12)))
    if jump != 2.0:
        failures.append(f"sgn should jump by 2 across 0, got {jump}")
    try:
        first_derivative(f, 0.0)
        failures.append("sgn should have no classical derivative at 0")
    except LiftInapplicableError:
        pass
    return {"jump": jump}, failures


def _constant_map() -> PMap:
    def zero(t):
        return np.zeros_like(np.asarray(t, dtype=float))[()]

    return make_weighted(zero, Interval(-1.0, 1.0), label="constant")


def _exp_map() -> PMap:
    return PMap(label="exp_shift", evaluate=lambda t, h: t + np.exp(h), domain=Interval(-1.0, 1.0))


@fixture("h1_no_solution")
def h1_no_solution(rng: np.random.Generator) -> Check:
    """p(t, h) = t: p(t, h) = t + eps has no solution, and D sgn(0) still evaluates to 0."""
    pm = _constant_map()
    report = check_hypotheses(pm, [0.0])
    failures = []
    if report.h1_plus or report.h1_minus:
        failures.append("H1 should fail for the constant map")
    if not any("has no solution" in f for f in report.failures):
        failures.append("H1 failure should report a missing solution")
    result = gd_limit(pm, builtin_function("sgn_right"), 0.0)
    if not result.differentiable or result.value != 0.0:
        failures.append(f"expected D sgn(0) = 0, got {result.value}")
    return {"failures": float(len(report.failures))}, failures


@fixture("h1_limit_violation")
def h1_limit_violation(rng: np.random.Generator) -> Check:
    """p(t, h) = t + e^h: solutions h = log(eps) exist but do not tend to 0."""
    pm = _exp_map()
    report = check_hypotheses(pm, [0.0])
    failures = []
    if report.h1_plus:
        failures.append("H1+ should fail for p = t + e^h")
    if not any("does not tend to 0" in f for f in report.failures):
        failures.append("H1+ failure should report that h does not tend to 0")
    return {"failures": float(len(report.failures))}, failures


@fixture("cubic_abs_at_zero")
def cubic_abs_at_zero(rng: np.random.Generator) -> Check:
    """|t| is p-differentiable at 0 under p = t + h^3 but has no lift there."""
    pm = make_builtin("cubic")
    f = builtin_function("abs")
    result = gd_limit(pm, f, 0.0)
    failures = []
    if not result.differentiable or abs(result.value) > 1e-12:
        failures.append(f"expected D|t|(0) = 0, got {result.value} ({result.outcome.value})")
    try:
        gd_lift(pm, f, 0.0)
        failures.append("gd_lift should refuse |t| at 0")
    except LiftInapplicableError:
        pass
    return {"value": result.value if result.value is not None else math.nan}, failures


# Sturm-Liouville


@fixture("degenerate_spectrum")
def degenerate_spectrum(rng: np.random.Generator) -> Check:
    """Ten random lambda in [0.1, 100] are all eigenvalues of the sign-map problem."""
    report = degenerate_check(rng.uniform(0.1, 100.0, 10))
    failures = [f"lambda={s.lam:.6g} failed" for s in report.samples if not s.passed]
    worst = max(s.residual for s in report.samples)
    return {"max_residual": worst}, failures


def _spectrum_oracle(pm: PMap, count: int, expected: Callable[[int], float], tol: float) -> Check:
    prob = make_problem(pm, 0.0, 1.0)
    spectrum = shoot_eigenvalues(prob, count)
    worst = max(
        _relative(lam, expected(n)) for n, lam in enumerate(spectrum.lambda_plus, start=1)
    )
    failures: List[str] = []
    if len(spectrum.lambda_plus) != count:
        failures.append(f"expected {count} eigenvalues, got {len(spectrum.lambda_plus)}")
    _below(failures, "max relative eigenvalue error", worst, tol)
    return {"max_relative_error": worst, "lambda_1": spectrum.lambda_plus[0]}, failures


@fixture("classical_spectrum")
def classical_spectrum(rng: np.random.Generator) -> Check:
    """-y'' = lambda y on [0, 1], Dirichlet: lambda_n = n^2 pi^2."""
    pm = make_builtin("classical", domain=Interval(0.0, 1.0))
    return _spectrum_oracle(pm, 5, lambda n: (n * math.pi) ** 2, 1e-8)


@fixture("khalil_spectrum")
def khalil_spectrum(rng: np.random.Generator) -> Check:
    """Khalil alpha = 0.5 on (0, 1], Dirichlet: lambda_n = n^2 pi^2 / 4."""
    pm = make_builtin("khalil", 0.5, Interval(0.0, 1.0, open_lo=True))
    return _spectrum_oracle(pm, 8, lambda n: (n * math.pi) ** 2 / 4.0, 1e-6)


def _sign_weight_root(n: int) -> float:
    """n-th positive root of sin x cosh x + cos x sinh x (cot x = -coth x)."""

    def characteristic(x: float) -> float:
        return math.sin(x) * math.cosh(x) + math.cos(x) * math.sinh(x)

    return optimize.brentq(characteristic, (n - 0.5) * math.pi, n * math.pi, xtol=1e-14)


@fixture("indefinite_asymptotics")
def indefinite_asymptotics(rng: np.random.Generator) -> Check:
    """w = sgn(t - 1/2) on [0, 1]: lambda_30 of both signs against 4 x^2 and the 2% window."""
    n = 30
    pm = make_builtin("classical", domain=Interval(0.0, 1.0))
    w = builtin_function("sgn_right").shifted(0.5)
    prob = make_problem(pm, 0.0, 1.0, w=w, breakpoints=[0.5])
    shooter = PruferShooter(prob)
    exact = 4.0 * _sign_weight_root(n) ** 2
    metrics, failures = {}, []
    for side, direction in (("plus", 1), ("minus", -1)):
        values, _ = shooter.branch(direction, 1, whole_line=False, offset=n - 1)
        lam = values[0]
        ratio = lam / asymptotic_estimate(prob, n, side)
        metrics[f"lambda_{side}"] = lam
        metrics[f"ratio_{side}"] = ratio
        _below(failures, f"|lambda_{side} / estimate - 1|", abs(ratio - 1.0), 0.02)
        error = _relative(lam, direction * exact)
        _below(failures, f"relative error of lambda_{side}", error, 1e-6)
    return metrics, failures


# Mechanics


@fixture("central_force_ellipse")
def central_force_ellipse(rng: np.random.Generator) -> Check:
    """Ellipse invariant along 1e4 samples for 20 random starts per map with p_h > 0."""
    t_end = 10.0
    specs = [
        PMapSpec(family="classical"),
        PMapSpec(family="khalil", alpha=0.5),
        PMapSpec(family="katugampola", alpha=0.5),
    ]
    worst = 0.0
    for spec in specs:
        pm = mechanics_pmap(spec, t_end)
        ts = sample_times(pm, t_end, 10_000)
        for _ in range(20):
            x0, y0, dx0, dy0 = rng.uniform(-1.0, 1.0, 4)
            cfg = CentralForceConfig(pm, float(rng.uniform(0.5, 2.0)), 1.0, x0, y0, dx0, dy0)
            traj = central_force_solve(cfg, ts)
            worst = max(worst, ellipse_invariant(traj, cfg.constants))
    failures: List[str] = []
    _below(failures, "max ellipse residual", worst, 1e-8)
    return {"max_residual": worst}, failures


def _max_gap(first, second, labels: Sequence[str]) -> float:
    return max(float(np.max(np.abs(first.column(c) - second.column(c)))) for c in labels)


@fixture("gravity_closed_vs_quadrature")
def gravity_closed_vs_quadrature(rng: np.random.Generator) -> Check:
    """Closed-form projectile against the quadrature solver, and the alpha -> 1 parabola."""
    x0, u0, y0, v0, g = 0.0, 1.0, 10.0, 1.0, 9.8
    metrics, failures = {}, []
    for alpha in (0.3, 0.5, 0.9):
        pm = mechanics_pmap(PMapSpec(family="khalil", alpha=alpha), 1.0)
        ts = sample_times(pm, 1.0, 21)
        closed = gravity_solve(pm, x0, u0, y0, v0, g, ts, "closed_form")
        quad = gravity_solve(pm, x0, u0, y0, v0, g, ts, "quadrature")
        gap = _max_gap(closed, quad, ("x", "y"))
        metrics[f"gap_alpha_{alpha:g}"] = gap
        _below(failures, f"closed vs quadrature gap at alpha={alpha:g}", gap, 1e-6)

    pm = mechanics_pmap(PMapSpec(family="khalil", alpha=1.0 - 1e-8), 1.0)
    ts = sample_times(pm, 1.0, 101)
    near = gravity_solve(pm, x0, u0, y0, v0, g, ts)
    parabola = y0 + v0 * ts - 0.5 * g * ts**2
    gap = float(np.max(np.abs(near.column("y") - parabola)))
    metrics["gap_parabola"] = gap
    _below(failures, "gap to the classical parabola", gap, 1e-6)
    return metrics, failures


@fixture("drag")
def drag(rng: np.random.Generator) -> Check:
    """Residual of p_h v' = g, terminal velocity and the tail quadrature on 5 random configs."""
    worst_residual = worst_terminal = worst_tail = 0.0
    for _ in range(5):
        m = float(rng.uniform(0.5, 2.0))
        C, rho, A = (float(x) for x in rng.uniform(0.5, 1.5, 3))
        alpha = float(rng.uniform(0.3, 0.9))
        for sigma in (1.0, None):
            cfg = DragConfig(m=m, C=C, rho=rho, A=A, alpha=alpha, sigma=sigma)
            ts = np.linspace(1e-3, 10.0, 200)
            worst_residual = max(worst_residual, float(np.max(cfg.residual(ts))))
            late = max(saturation_time(cfg), 1.0)
            worst_terminal = max(
                worst_terminal,
                _relative(float(cfg.velocity(late)), cfg.terminal_velocity),
            )
        # sigma = 1 keeps the transient long enough to compare the tail quadrature
        cfg = DragConfig(m=m, C=C, rho=rho, A=A, alpha=alpha, sigma=1.0)
        upper = saturation_time(cfg)
        for fraction in (0.1, 0.5, 0.9):
            t = fraction * upper
            if t > 0.0:
                gap = abs(drag_tail_velocity(cfg, t) - float(cfg.velocity(t)))
                worst_tail = max(worst_tail, gap / cfg.terminal_velocity)
    failures: List[str] = []
    _below(failures, "max |p_h v' - g|", worst_residual, 1e-8)
    _below(failures, "terminal velocity relative error", worst_terminal, 1e-6)
    _below(failures, "tail quadrature relative gap", worst_tail, 1e-6)
    return {
        "max_residual": worst_residual,
        "terminal_error": worst_terminal,
        "tail_gap": worst_tail,
    }, failures


@fixture("nbody_two_body")
def nbody_two_body(rng: np.random.Generator) -> Check:
    """Circular two-body orbit under khalil alpha = 0.5 over 1e4 slow-time steps."""
    spec = NBodySpec()
    pm = mechanics_pmap(PMapSpec(family="khalil", alpha=0.5), spec.t_end)
    result = nbody_integrate(NBodySystem.from_spec(spec), pm, spec.t_end, spec.dt_tau)
    failures: List[str] = []
    if result.steps < 10_000:
        failures.append(f"expected at least 10000 steps, got {result.steps}")
    _below(failures, "Hausdorff distance of the t and tau paths", result.hausdorff, 1e-6)
    _below(failures, "relative energy drift", result.energy_drift, 1e-6)
    return {
        "hausdorff": result.hausdorff,
        "energy_drift": result.energy_drift,
        "steps": float(result.steps),
    }, failures


# Units


@fixture("units")
def units(rng: np.random.Generator) -> Check:
    """3 m/sec and 9.8 m/sec^2 at alpha = 0.99 are 2.38 and 6.19 in alpha-seconds."""
    velocity = convert_velocity(3.0, 0.99).magnitude
    acceleration = convert_acceleration(9.8, 0.99).magnitude
    failures = []
    if round(velocity, 2) != 2.38:
        failures.append(f"velocity {velocity:.4f} does not round to 2.38")
    if round(acceleration, 2) != 6.19:
        failures.append(f"acceleration {acceleration:.4f} does not round to 6.19")
    for term, dims in gravity_term_dimensions(0.99).items():
        if dims[0] != 1 or abs(dims[1]) > 1e-12:
            failures.append(f"gravity term {term} has dimensions {dims}, expected meters")
    return {"velocity": velocity, "acceleration": acceleration}, failures


def _fixture_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(name.encode())])


def run_fixture(name: str, seed: Optional[int] = None) -> FixtureResult:
    """
    Run one fixture; an exception inside it counts as a failure.

    The random stream depends only on the seed and the fixture name, so a
    fixture gives the same result alone, in the full suite or in parallel.
    """
    seed = settings.VERIFY_SEED if seed is None else seed
    with PerformanceMonitoringContext(f"fixture:{name}", log_level=logging.DEBUG) as ctx:
        try:
            metrics, failures = FIXTURES[name](_fixture_rng(seed, name))
        except Exception as e:
            logger.exception(f"Fixture {name} raised")
            metrics, failures = {}, [f"{type(e).__name__}: {e}"]
    result = FixtureResult(
        name=name, passed=not failures, detail="; ".join(failures), metrics=metrics
    )
    get_metrics_logger().log_fixture(name, result.passed, ctx.duration_ms, result.detail)
    return result


def run_suite(
    jobs: int = 1, only: Optional[Sequence[str]] = None, seed: Optional[int] = None
) -> VerifyReport:
    """
    Run the registered fixtures and collect a report in registration order.

    Args:
        jobs: Fixtures evaluated concurrently
        only: Restrict to these fixture names
        seed: Random seed; GENCALC_VERIFY_SEED when omitted

    Raises:
        ConfigurationError: If only names an unknown fixture or jobs < 1
    """
    if jobs < 1:
        raise ConfigurationError(f"jobs must be at least 1, got {jobs}")
    if only:
        unknown = [name for name in only if name not in FIXTURES]
        if unknown:
            raise ConfigurationError(
                f"Unknown fixtures: {', '.join(unknown)}. Available: {', '.join(FIXTURES)}"
            )
        names = [name for name in FIXTURES if name in set(only)]
    else:
        names = list(FIXTURES)

    if jobs == 1:
        results = [run_fixture(name, seed) for name in names]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(run_fixture, name, seed) for name in names]
            results = [future.result() for future in futures]

    failed = [r.name for r in results if not r.passed]
    logger.info(f"Verification: {len(results) - len(failed)}/{len(results)} fixtures passed")
    return VerifyReport(passed=not failed, total=len(results), failed=failed, fixtures=results)
