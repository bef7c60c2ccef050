"""
Mechanics service for gencalc.

Classical-mechanics problems with the time derivative replaced by a generalized
derivative: central force, projectile under gravity, quadratic drag and the
gravitational n-body problem.
Classes:
    Trajectory: Sampled motion with slow time and labelled state columns
    CentralForceConfig: Central-force run parameters
    DragConfig: Drag run parameters
    NBodySystem: Initial state of an n-body run
Functions:
    central_force_solve, gravity_solve, drag_solve, nbody_integrate: The solvers
"""
from .base import (
    TIME_ORIGIN,
    Trajectory,
    mechanics_pmap,
    sample_times,
    start_time,
    tau_from_origin,
)
from .central_force import (
    CentralForceConfig,
    central_force_components,
    central_force_residual,
    central_force_solve,
    ellipse_invariant,
)
from .drag import (
    DragConfig,
    classical_drag_solve,
    drag_solve,
    drag_tail_velocity,
    saturation_time,
)
from .gravity import gravity_solve, slow_time_threshold
from .nbody import (
    NBodyResult,
    NBodySystem,
    accelerations,
    angular_momentum,
    energy,
    free_fall_time,
    leapfrog_step,
    nbody_integrate,
    path_hausdorff,
)

__all__ = [
    # Base
    "TIME_ORIGIN",
    "Trajectory",
    "mechanics_pmap",
    "sample_times",
    "start_time",
    "tau_from_origin",
    # Central force
    "CentralForceConfig",
    "central_force_components",
    "central_force_residual",
    "central_force_solve",
    "ellipse_invariant",
    # Gravity
    "gravity_solve",
    "slow_time_threshold",
    # Drag
    "DragConfig",
    "drag_solve",
    "drag_tail_velocity",
    "classical_drag_solve",
    "saturation_time",
    # N-body
    "NBodySystem",
    "NBodyResult",
    "nbody_integrate",
    "leapfrog_step",
    "accelerations",
    "energy",
    "angular_momentum",
    "free_fall_time",
    "path_hausdorff",
]
