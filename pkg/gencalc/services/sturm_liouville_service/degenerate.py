"""
Degenerate spectrum of the sign-map problem.

With p(t, h) = t + sgn(t) h on [-1, 1], P = 1, q = 0 and Dirichlet conditions,
y(t) = sin(sqrt(lambda) (|t| - 1)) solves -D^2 y = lambda y for every real
lambda, so every real number is an eigenvalue.
"""
import logging
from typing import Iterable, Optional

import numpy as np

from gencalc.core.models import DegenerateReport, DegenerateSample
from gencalc.services.derivative_service import gd_second
from gencalc.services.pmap_service import make_builtin
from gencalc.services.sturm_liouville_service.closed_form import (
    closed_form_solution,
    linear_solution,
)
from gencalc.services.sturm_liouville_service.problem import SLProblem, make_problem

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-6
FLUX_TOL = 1e-8
BOUNDARY_TOL = 1e-14
_FLUX_OFFSET = 1e-12

DEFAULT_SAMPLE_TS = np.concatenate([-np.linspace(0.95, 0.05, 10), np.linspace(0.05, 0.95, 10)])


def sign_map_problem() -> SLProblem:
    """The Dirichlet problem of the sign map on [-1, 1]."""
    return make_problem(make_builtin("sign_map"), -1.0, 1.0)


def _check(prob: SLProblem, lam: float, sample_ts: np.ndarray) -> DegenerateSample:
    if lam == 0.0:
        solution = linear_solution(prob, 1.0, 0.0)
    else:
        solution = closed_form_solution(prob, lam, 1.0, 0.0)
    y, Dy = solution.y, solution.Dy
    left, right = abs(float(y(-1.0))), abs(float(y(1.0)))
    flux_jump = abs(float(Dy(_FLUX_OFFSET)) - float(Dy(-_FLUX_OFFSET)))
    residual = max(abs(gd_second(prob.pm, y, float(t)) + lam * float(y(t))) for t in sample_ts)
    passed = (
        left <= BOUNDARY_TOL
        and right <= BOUNDARY_TOL
        and flux_jump <= FLUX_TOL
        and residual < RESIDUAL_TOL
    )
    return DegenerateSample(
        lam=lam,
        boundary_left=left,
        boundary_right=right,
        flux_jump=flux_jump,
        residual=residual,
        passed=passed,
    )


def degenerate_check(
    lambda_samples: Iterable[float], sample_ts: Optional[Iterable[float]] = None
) -> DegenerateReport:
    """
    Verify that each sampled real lambda is an eigenvalue of the sign-map problem.

    For each lambda the hand-built y is checked for exact Dirichlet values,
    continuity of p_h y' across t = 0 and the residual |D^2 y + lambda y| on
    sample points away from 0.
    """
    prob = sign_map_problem()
    ts = DEFAULT_SAMPLE_TS if sample_ts is None else np.asarray(list(sample_ts), dtype=float)
    samples = [_check(prob, float(lam), ts) for lam in lambda_samples]
    report = DegenerateReport(all_passed=all(s.passed for s in samples), samples=samples)
    if not report.all_passed:
        failed = [s.lam for s in samples if not s.passed]
        logger.warning(f"Degenerate check failed for lambda in {failed}")
    return report
