"""
Core data models for gencalc.

This module contains Pydantic models that define the structure of data read from
CLI flags / JSON run configurations and written back as JSON results.
"""
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class DerivativeMethod(str, Enum):
    """How a generalized derivative was evaluated."""

    LIMIT = "limit"
    LIFT = "lift"


class DerivativeOutcome(str, Enum):
    """Outcome of a generalized derivative evaluation."""

    OK = "ok"
    NOT_DIFFERENTIABLE = "not_p_differentiable"


PMapFamilyName = Literal[
    "classical",
    "khalil",
    "katugampola",
    "symmetric_abs",
    "sign_map",
    "quadratic",
    "cubic",
    "quadratic_alpha",
]


class PMapSpec(BaseModel):
    """Catalog p-map descriptor as it appears in run configurations."""

    model_config = ConfigDict(extra="forbid")

    family: PMapFamilyName = Field(..., description="Catalog family name, e.g. khalil")
    alpha: Optional[float] = Field(None, gt=0, le=1, description="Fractional order in (0, 1]")
    domain: Optional[Tuple[float, float]] = Field(
        None, description="Domain [lo, hi]; defaults depend on the family"
    )
    open_lo: bool = Field(False, description="Exclude the lower end of the domain")
    open_hi: bool = Field(False, description="Exclude the upper end of the domain")


class FunctionSpec(BaseModel):
    """A coefficient function: scale * builtin(t - shift), or a constant."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field("constant", description="Builtin function name or 'constant'")
    value: float = Field(1.0, description="Value used when name is 'constant'")
    scale: float = Field(1.0, description="Multiplier applied to the builtin")
    shift: float = Field(0.0, description="Argument shift of the builtin")


class DerivRequest(BaseModel):
    """Run configuration of the deriv subcommand."""

    model_config = ConfigDict(extra="forbid")

    pmap: PMapSpec
    fn: str = Field(..., description="Builtin function name")
    t: float = Field(..., description="Evaluation point")
    method: DerivativeMethod = Field(DerivativeMethod.LIMIT, description="limit or lift")
    base_step: Optional[float] = Field(None, gt=0, description="Override base step h0")
    depth: Optional[int] = Field(None, ge=1, le=8, description="Richardson depth")
    hypotheses: bool = Field(False, description="Also report H1+-, H2 and continuity at t")


class SLRequest(BaseModel):
    """Run configuration of the sl subcommand."""

    model_config = ConfigDict(extra="forbid")

    pmap: PMapSpec
    interval: Tuple[float, float] = Field(..., description="Problem interval [a, b]")
    P: FunctionSpec = Field(default_factory=lambda: FunctionSpec(value=1.0))
    q: FunctionSpec = Field(default_factory=lambda: FunctionSpec(value=0.0))
    w: FunctionSpec = Field(default_factory=lambda: FunctionSpec(value=1.0))
    bc: Literal["dirichlet", "neumann", "custom"] = Field("dirichlet")
    mu: float = Field(0.0, ge=0.0, description="Boundary angle at a, in [0, pi)")
    nu: float = Field(0.0, ge=0.0, description="Boundary angle at b, in [0, pi)")
    n: int = Field(5, ge=1, le=200, description="Eigenvalues per side")
    breakpoints: List[float] = Field(default_factory=list)
    eigenfunction_samples: int = Field(0, ge=0, description="Samples per exported eigenfunction")

    @model_validator(mode="after")
    def check_interval(self) -> "SLRequest":
        """Reject empty intervals."""
        if not self.interval[0] < self.interval[1]:
            raise ValueError("interval must satisfy a < b")
        return self


class CentralForceSpec(BaseModel):
    """Central force run parameters."""

    model_config = ConfigDict(extra="forbid")

    k: float = Field(1.0, gt=0)
    mass: float = Field(1.0, gt=0)
    x0: float = 1.0
    y0: float = 0.0
    dx0: float = Field(0.0, description="Initial generalized velocity Dx(0)")
    dy0: float = Field(1.0, description="Initial generalized velocity Dy(0)")
    t_end: float = Field(10.0, gt=0)
    samples: int = Field(1001, ge=2)


class GravitySpec(BaseModel):
    """Projectile under constant gravity."""

    model_config = ConfigDict(extra="forbid")

    x0: float = 0.0
    u0: float = 1.0
    y0: float = 0.0
    v0: float = 1.0
    g: float = Field(9.8, gt=0)
    t_end: float = Field(1.0, gt=0)
    samples: int = Field(101, ge=2)
    method: Literal["auto", "quadrature", "closed_form"] = "auto"


class DragSpec(BaseModel):
    """Fall with quadratic drag."""

    model_config = ConfigDict(extra="forbid")

    m: float = Field(1.0, gt=0)
    g: float = Field(9.8, gt=0)
    C: float = Field(1.0, gt=0)
    rho: float = Field(1.0, gt=0)
    A: float = Field(1.0, gt=0)
    alpha: float = Field(0.5, gt=0, lt=1)
    sigma: Optional[float] = Field(None, gt=0, description="Defaults to GENCALC_SIGMA")
    t_end: float = Field(2.0, gt=0)
    samples: int = Field(101, ge=2)


class NBodySpec(BaseModel):
    """Gravitational n-body system."""

    model_config = ConfigDict(extra="forbid")

    masses: List[float] = Field(default_factory=lambda: [0.5, 0.5])
    positions: List[Tuple[float, float, float]] = Field(
        default_factory=lambda: [(0.5, 0.0, 0.0), (-0.5, 0.0, 0.0)]
    )
    velocities: List[Tuple[float, float, float]] = Field(
        default_factory=lambda: [(0.0, 0.5, 0.0), (0.0, -0.5, 0.0)],
        description="Initial dq/dtau",
    )
    G: float = Field(1.0, gt=0)
    t_end: float = Field(25.0, gt=0)
    dt_tau: float = Field(1e-3, gt=0)


class SimulateRequest(BaseModel):
    """Run configuration of the simulate subcommand."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["central-force", "gravity", "drag", "nbody"]
    pmap: Optional[PMapSpec] = None
    central_force: CentralForceSpec = Field(default_factory=CentralForceSpec)
    gravity: GravitySpec = Field(default_factory=GravitySpec)
    drag: DragSpec = Field(default_factory=DragSpec)
    nbody: NBodySpec = Field(default_factory=NBodySpec)


class UnitsRequest(BaseModel):
    """Run configuration of the units subcommand."""

    model_config = ConfigDict(extra="forbid")

    value: float
    unit: str = Field(..., description="m/s or m/s2")
    alpha: float = Field(..., gt=0, le=1)
    sigma: Optional[float] = Field(None, gt=0)


class VerifyRequest(BaseModel):
    """Run configuration of the verify subcommand."""

    model_config = ConfigDict(extra="forbid")

    jobs: int = Field(1, ge=1, description="Fixtures evaluated in parallel")
    only: Optional[List[str]] = Field(None, description="Restrict to these fixtures")
    seed: Optional[int] = Field(None, description="Override GENCALC_VERIFY_SEED")


class DerivativeResult(BaseModel):
    """Value of a generalized derivative at a point."""

    value: Optional[float] = Field(None, description="D_p f(t); None when not p-differentiable")
    method: DerivativeMethod
    outcome: DerivativeOutcome = DerivativeOutcome.OK
    estimated_error: float = Field(0.0, ge=0.0)
    one_sided: Optional[Literal["left", "right"]] = Field(
        None, description="Side used when the other one leaves the domain"
    )

    @property
    def differentiable(self) -> bool:
        """Whether the limit exists."""
        return self.outcome == DerivativeOutcome.OK


class HypothesisSample(BaseModel):
    """Evidence for one (t, eps) solve of p(t, h) = t +- eps."""

    t: float
    eps: float
    h: Optional[float] = Field(None, description="Solution closest to h = 0, if any")
    abs_h: Optional[float] = None
    inside_delta: bool = False


class HypothesisReport(BaseModel):
    """Numerical verdict on the solvability and integrability hypotheses."""

    h1_plus: bool
    h1_minus: bool
    h2: bool
    continuity_at_zero: bool
    h1_plus_evidence: List[HypothesisSample] = Field(default_factory=list)
    h1_minus_evidence: List[HypothesisSample] = Field(default_factory=list)
    h2_integral: Optional[float] = Field(None, description="Estimate of int |1/p_h(s,0)| ds")
    ratio_condition: Literal["assumed"] = Field(
        "assumed", description="lim eps/h(t, eps) exists and is non-zero; not checked"
    )
    failures: List[str] = Field(default_factory=list)


class RuleResiduals(BaseModel):
    """Residuals of the sum, product, quotient and chain rules."""

    sum: Optional[float] = None
    product: Optional[float] = None
    quotient: Optional[float] = None
    chain: Optional[float] = None
    violations: Dict[str, str] = Field(default_factory=dict)


class Spectrum(BaseModel):
    """Real eigenvalues of a generalized Sturm-Liouville problem."""

    lambda_plus: List[float] = Field(default_factory=list)
    lambda_minus: List[float] = Field(default_factory=list)
    oscillation_counts_plus: List[int] = Field(default_factory=list)
    oscillation_counts_minus: List[int] = Field(default_factory=list)
    asymptotic_constants: Dict[str, float] = Field(
        default_factory=dict,
        description="int sqrt((w/p_h)_+-) ds per side; sides without a branch are omitted",
    )
    asymptotic: Dict[str, List[Optional[float]]] = Field(default_factory=dict)
    weyl: Dict[str, List[Optional[float]]] = Field(default_factory=dict)
    definite: bool = True


class DegenerateSample(BaseModel):
    """Checks of the hand-built solution for one lambda of the sign-map problem."""

    lam: float
    boundary_left: float = Field(..., description="|y(-1)|")
    boundary_right: float = Field(..., description="|y(1)|")
    flux_jump: float = Field(..., description="|p_h y'| jump across t = 0")
    residual: float = Field(..., description="max |D^2 y + lambda y| on the sample grid")
    passed: bool


class DegenerateReport(BaseModel):
    """Every sampled real lambda of the sign-map problem is an eigenvalue."""

    all_passed: bool
    samples: List[DegenerateSample] = Field(default_factory=list)


class DerivResponse(BaseModel):
    """Output of the deriv subcommand."""

    pmap: str
    fn: str
    t: float
    result: DerivativeResult
    hypotheses: Optional[HypothesisReport] = None


class SLResponse(BaseModel):
    """Output of the sl subcommand."""

    pmap: str
    interval: Tuple[float, float]
    spectrum: Spectrum
    eigenfunction_residuals: Dict[str, float] = Field(
        default_factory=dict, description="Integral-form residual per exported eigenfunction"
    )
    artifacts: List[str] = Field(default_factory=list, description="CSV files written")


class SimulationSummary(BaseModel):
    """Output of the simulate subcommand."""

    kind: str
    pmap: str
    samples: int
    t_end: float
    diagnostics: Dict[str, float] = Field(default_factory=dict)
    artifacts: List[str] = Field(default_factory=list, description="CSV files written")


class FixtureResult(BaseModel):
    """Outcome of one verification fixture."""

    name: str
    passed: bool
    detail: str = ""
    metrics: Dict[str, float] = Field(default_factory=dict)


class VerifyReport(BaseModel):
    """Outcome of the verification suite."""

    passed: bool
    total: int
    failed: List[str] = Field(default_factory=list)
    fixtures: List[FixtureResult] = Field(default_factory=list)


class ErrorResponse(BaseModel):
    """Diagnostic document written on failure."""

    detail: str = Field(..., description="Error detail message")
    error_type: str = Field(..., description="Exception class name")
    exit_code: int = Field(..., description="Process exit code")
    context: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("exit_code")
    def check_exit_code(cls, v: int) -> int:
        """Only failure codes belong in an error document."""
        if v not in (1, 2):
            raise ValueError("exit_code must be 1 or 2")
        return v
