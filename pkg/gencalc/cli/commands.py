"""
Subcommand handlers.

Every handler takes its validated request and returns a CommandOutput: the
JSON summary plus the sampled artifacts (trajectories, eigenfunctions) that go
to CSV files.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Union

import numpy as np
from pydantic import BaseModel

from gencalc.cli.verify import run_suite
from gencalc.core.config import settings
from gencalc.core.models import (
    DerivativeMethod,
    DerivRequest,
    DerivResponse,
    SimulateRequest,
    SimulationSummary,
    SLRequest,
    SLResponse,
    UnitsRequest,
    VerifyRequest,
)
from gencalc.core.monitoring import monitor_performance_context
from gencalc.services.derivative_service import builtin_function, gd_lift, gd_limit
from gencalc.services.mechanics_service import (
    CentralForceConfig,
    DragConfig,
    NBodySystem,
    Trajectory,
    central_force_residual,
    central_force_solve,
    drag_solve,
    ellipse_invariant,
    gravity_solve,
    mechanics_pmap,
    nbody_integrate,
    sample_times,
    saturation_time,
    slow_time_threshold,
)
from gencalc.services.pmap_service import check_hypotheses, pmap_from_spec
from gencalc.services.sturm_liouville_service import (
    EigenFunction,
    eigenfunction,
    problem_from_request,
    shoot_eigenvalues,
)
from gencalc.services.units_service import convert

logger = logging.getLogger(__name__)

Artifact = Union[Trajectory, EigenFunction]

# Interior fraction of [0, t_end] sampled for the central-force equation residual
_RESIDUAL_PROBES = np.linspace(0.25, 0.75, 5)


@dataclass
class CommandOutput:
    """Result of one subcommand."""

    summary: BaseModel
    artifacts: Dict[str, Artifact] = field(default_factory=dict)
    exit_code: int = 0


def run_deriv(request: DerivRequest) -> CommandOutput:
    pm = pmap_from_spec(request.pmap)
    f = builtin_function(request.fn)
    if request.method == DerivativeMethod.LIFT:
        result = gd_lift(pm, f, request.t)
    else:
        result = gd_limit(pm, f, request.t, request.base_step, request.depth)
    hypotheses = check_hypotheses(pm, [request.t]) if request.hypotheses else None
    response = DerivResponse(
        pmap=pm.label, fn=f.label, t=request.t, result=result, hypotheses=hypotheses
    )
    return CommandOutput(summary=response)


def run_sl(request: SLRequest) -> CommandOutput:
    """Spectrum of the requested problem, with eigenfunctions when samples are asked for."""
    prob = problem_from_request(request)
    spectrum = shoot_eigenvalues(prob, request.n)
    response = SLResponse(pmap=prob.pm.label, interval=(prob.a, prob.b), spectrum=spectrum)
    artifacts: Dict[str, Artifact] = {}
    if request.eigenfunction_samples:
        for side, values in (("plus", spectrum.lambda_plus), ("minus", spectrum.lambda_minus)):
            for index, lam in enumerate(values, start=1):
                name = f"eigenfunction_{side}_{index}"
                ef = eigenfunction(prob, lam, request.eigenfunction_samples)
                artifacts[name] = ef
                response.eigenfunction_residuals[name] = ef.residual
    return CommandOutput(summary=response, artifacts=artifacts)


def _central_force(request: SimulateRequest) -> CommandOutput:
    spec = request.central_force
    pm = mechanics_pmap(request.pmap, spec.t_end)
    cfg = CentralForceConfig(pm, spec.k, spec.mass, spec.x0, spec.y0, spec.dx0, spec.dy0)
    traj = central_force_solve(cfg, sample_times(pm, spec.t_end, spec.samples))
    diagnostics = {
        "ellipse_residual": ellipse_invariant(traj, cfg.constants),
        "equation_residual": central_force_residual(cfg, _RESIDUAL_PROBES * spec.t_end),
        "tau_end": float(traj.tau[-1]),
    }
    summary = SimulationSummary(
        kind=request.kind,
        pmap=pm.label,
        samples=len(traj),
        t_end=spec.t_end,
        diagnostics=diagnostics,
    )
    return CommandOutput(summary=summary, artifacts={"central_force": traj})


def _gravity(request: SimulateRequest) -> CommandOutput:
    spec = request.gravity
    pm = mechanics_pmap(request.pmap, spec.t_end)
    ts = sample_times(pm, spec.t_end, spec.samples)
    traj = gravity_solve(pm, spec.x0, spec.u0, spec.y0, spec.v0, spec.g, ts, spec.method)
    diagnostics = {
        "x_end": float(traj.column("x")[-1]),
        "y_end": float(traj.column("y")[-1]),
        "tau_end": float(traj.tau[-1]),
    }
    if pm.alpha is not None and pm.alpha < 1.0:
        diagnostics["slow_time_threshold"] = slow_time_threshold(pm.alpha)
    summary = SimulationSummary(
        kind=request.kind,
        pmap=pm.label,
        samples=len(traj),
        t_end=spec.t_end,
        diagnostics=diagnostics,
    )
    return CommandOutput(summary=summary, artifacts={"gravity": traj})


def _drag(request: SimulateRequest) -> CommandOutput:
    spec = request.drag
    if request.pmap is not None:
        logger.warning("simulate drag builds its own p-map; the pmap descriptor is ignored")
    cfg = DragConfig.from_spec(spec)
    ts = np.linspace(settings.MECHANICS_EPSILON, spec.t_end, spec.samples)
    traj = drag_solve(cfg, ts)
    v = traj.column("v")
    diagnostics = {
        "terminal_velocity": cfg.terminal_velocity,
        "v_end": float(v[-1]),
        "max_residual": float(np.max(traj.column("residual"))),
        "saturation_time": saturation_time(cfg),
        "rate": cfg.rate,
    }
    summary = SimulationSummary(
        kind=request.kind,
        pmap=cfg.pmap(spec.t_end).label,
        samples=len(traj),
        t_end=spec.t_end,
        diagnostics=diagnostics,
    )
    return CommandOutput(summary=summary, artifacts={"drag": traj})


def _nbody(request: SimulateRequest) -> CommandOutput:
    spec = request.nbody
    pm = mechanics_pmap(request.pmap, spec.t_end)
    result = nbody_integrate(NBodySystem.from_spec(spec), pm, spec.t_end, spec.dt_tau)
    diagnostics = {
        "energy_drift": result.energy_drift,
        "angular_momentum_drift": result.angular_momentum_drift,
        "hausdorff": result.hausdorff,
        "tau_end": result.tau_end,
        "steps": float(result.steps),
    }
    summary = SimulationSummary(
        kind=request.kind,
        pmap=pm.label,
        samples=len(result.traj_t),
        t_end=spec.t_end,
        diagnostics=diagnostics,
    )
    return CommandOutput(
        summary=summary, artifacts={"nbody_t": result.traj_t, "nbody_tau": result.traj_tau}
    )


SIMULATION_HANDLERS: Dict[str, Callable[[SimulateRequest], CommandOutput]] = {
    "central-force": _central_force,
    "gravity": _gravity,
    "drag": _drag,
    "nbody": _nbody,
}


def run_simulate(request: SimulateRequest) -> CommandOutput:
    with monitor_performance_context("simulate", kind=request.kind):
        return SIMULATION_HANDLERS[request.kind](request)


def run_units(request: UnitsRequest) -> CommandOutput:
    return CommandOutput(summary=convert(request.value, request.unit, request.alpha, request.sigma))


def run_verify(request: VerifyRequest) -> CommandOutput:
    """Run the fixture suite; exit code 1 when a fixture fails."""
    report = run_suite(jobs=request.jobs, only=request.only, seed=request.seed)
    return CommandOutput(summary=report, exit_code=0 if report.passed else 1)


HANDLERS: Dict[str, Callable[..., CommandOutput]] = {
    "deriv": run_deriv,
    "sl": run_sl,
    "simulate": run_simulate,
    "units": run_units,
    "verify": run_verify,
}
