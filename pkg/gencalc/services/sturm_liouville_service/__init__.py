"""
Sturm-Liouville service for gencalc.

Builds generalized Sturm-Liouville problems, reduces them to weighted classical
form, tabulates the time change and computes real spectra by Prufer shooting.
Classes:
    SLProblem: Validated problem -D(P Dy) + q y = lambda w y on [a, b]
    TimeChange: Tabulated tau(t) with its inverse
    EigenFunction: Reconstructed eigenfunction samples
Functions:
    make_problem: Validating constructor
    time_change: tau(t) = int_a^t ds / (P p_h)
    closed_form_solution: Trigonometric and hyperbolic solutions for P = 1, q = 0, w = 1
    shoot_eigenvalues: Real eigenvalues of both branches
    asymptotic_estimate: Large-n behaviour of the eigenvalues
    degenerate_check: Every real lambda is an eigenvalue of the sign-map problem
"""
from .closed_form import (
    ClosedFormSolution,
    closed_form_solution,
    linear_solution,
    variation_of_parameters,
)
from .degenerate import degenerate_check, sign_map_problem
from .problem import (
    BOUNDARY_ANGLES,
    SLProblem,
    WeightedClassical,
    make_problem,
    problem_from_request,
    to_classical,
)
from .spectrum import (
    EigenFunction,
    PruferShooter,
    asymptotic_estimate,
    eigenfunction,
    oscillation_count,
    shoot_eigenvalues,
    weyl_estimate,
)
from .time_change import TimeChange, pmap_time_change, time_change

__all__ = [
    # Problems
    "SLProblem",
    "WeightedClassical",
    "make_problem",
    "problem_from_request",
    "to_classical",
    "BOUNDARY_ANGLES",
    # Time change
    "TimeChange",
    "time_change",
    "pmap_time_change",
    # Closed forms
    "ClosedFormSolution",
    "closed_form_solution",
    "linear_solution",
    "variation_of_parameters",
    # Spectrum
    "PruferShooter",
    "EigenFunction",
    "shoot_eigenvalues",
    "eigenfunction",
    "oscillation_count",
    "asymptotic_estimate",
    "weyl_estimate",
    # Degenerate spectrum
    "degenerate_check",
    "sign_map_problem",
]
