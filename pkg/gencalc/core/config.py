"""
Configuration module for gencalc.

This module provides centralized configuration management using Pydantic's
BaseSettings, which allows for environment variable overrides and .env file loading.
Numerical defaults used by the services live here so they can be surfaced as
CLI flags and overridden per environment.
"""
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional

from dotenv import load_dotenv
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from gencalc.core.errors import ConfigurationError

# Load environment variables from .env file
load_dotenv()
# Get the base directory of the package
BASE_DIR = Path(__file__).resolve().parent.parent.parent

#: Cesium-133 hyperfine transition cycles per SI second.
CESIUM_CYCLES = 9192631770.0


class Settings(BaseSettings):
    """Numerical defaults, physical constants and logging options of gencalc."""

    PROJECT_NAME: str = Field(default="gencalc", description="Project name")

    # Physical constants
    SIGMA: float = Field(
        default=CESIUM_CYCLES,
        description="Cosmic time factor sigma used for alpha-second conversions",
    )

    # Derivative engine
    DERIV_BASE_STEP: float = Field(
        default=1e-3, description="Base step factor h0 = DERIV_BASE_STEP * max(1, |t|)"
    )
    RICHARDSON_DEPTH: int = Field(default=4, description="Richardson extrapolation depth")
    DERIV_SIDE_RTOL: float = Field(
        default=1e-6, description="Relative tolerance for one-sided limit convergence/agreement"
    )
    DERIV_SIDE_ATOL: float = Field(
        default=1e-8, description="Absolute floor for one-sided limit convergence/agreement"
    )
    DERIV_CONV_TOL: float = Field(
        default=1e-4,
        description="Largest accepted Richardson error, relative to max(1, |estimate|)",
    )
    DERIV_SECOND_STEP: float = Field(
        default=1e-2, description="Outer step factor of the composed second-order operator"
    )
    PH_RTOL: float = Field(
        default=1e-9, description="Relative agreement of successive numeric p_h(t,0) estimates"
    )
    PH_ATOL: float = Field(default=1e-12, description="Absolute floor for numeric p_h(t,0)")

    # Hypothesis checks
    BISECTION_DEPTH: int = Field(
        default=40, description="Geometric bracket grid depth k for +-delta*2^-k"
    )
    H_LIMIT_TOL: float = Field(
        default=1e-3, description="Final |h(t, eps)| must fall below this fraction of delta"
    )
    QUAD_REFINE_RTOL: float = Field(
        default=1e-6, description="Successive quadrature refinements must agree to this"
    )

    # Sturm-Liouville
    SL_ETA: float = Field(default=1e-10, description="Width of the jump across singular points")
    SL_LAMBDA_MAX: float = Field(default=1e8, description="Ceiling of the eigenvalue scan")
    ODE_RTOL: float = Field(default=1e-11, description="Relative tolerance of Prufer integration")
    ODE_ATOL: float = Field(default=1e-11, description="Absolute tolerance of Prufer integration")
    TIME_CHANGE_TOL: float = Field(
        default=1e-8, description="Linear interpolation tolerance of the tau grid"
    )
    TIME_CHANGE_MAX_POINTS: int = Field(
        default=50000, description="Maximum refined tau grid size"
    )

    # Mechanics
    MECHANICS_EPSILON: float = Field(
        default=1e-12, description="Start time used instead of t=0 for fractional families"
    )
    NBODY_SAFETY: float = Field(
        default=0.05, description="Step must stay below this fraction of the free-fall time"
    )
    NBODY_MIN_STEP: float = Field(default=1e-9, description="Smallest accepted n-body substep")

    # Verification suite
    VERIFY_SEED: int = Field(default=20240601, description="Seed for randomized fixtures")

    # Logging settings
    LOG_LEVEL: str = Field(default="WARNING", description="Logging level")
    LOG_DIR: Path = Field(default=BASE_DIR / "logs", description="Directory for log files")
    ENABLE_FILE_LOGGING: bool = Field(default=False, description="Enable logging to files")
    LOG_FORMAT_JSON: bool = Field(
        default=True, description="Format logs as JSON (better for log aggregation)"
    )
    LOG_ROTATION_TYPE: str = Field(default="size", description="Log rotation type (size or time)")
    LOG_MAX_SIZE: int = Field(
        default=10485760, description="Maximum log file size in bytes for size-based rotation"
    )
    LOG_ROTATION_WHEN: str = Field(
        default="D", description="Time unit for time-based log rotation (S, M, H, D, midnight)"
    )
    LOG_ROTATION_INTERVAL: int = Field(default=1, description="Interval for time-based rotation")
    LOG_BACKUP_COUNT: int = Field(default=30, description="Number of backup log files to keep")

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="GENCALC_",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("SIGMA")
    def check_sigma(cls, v: float) -> float:
        """Reject non-positive cosmic time factors."""
        if v <= 0:
            raise ValueError("SIGMA must be positive")
        return v

    @field_validator("LOG_LEVEL")
    def normalise_level(cls, v: str) -> str:
        """Upper-case the log level name."""
        return v.upper()

    def log_file(self) -> Optional[Path]:
        """Get the log file path, or None if file logging is disabled."""
        if not self.ENABLE_FILE_LOGGING:
            return None
        return self.LOG_DIR / f"{self.PROJECT_NAME}.log"


# Create a singleton settings instance
settings = Settings()


@contextmanager
def override_settings(**overrides: Any) -> Iterator[Settings]:
    """
    Temporarily replace settings fields, restoring them on exit.

    Raises:
        ConfigurationError: If a field name is unknown or a value fails validation
    """
    unknown = [name for name in overrides if name not in Settings.model_fields]
    if unknown:
        raise ConfigurationError(f"Unknown settings: {', '.join(sorted(unknown))}")
    try:
        validated = Settings.model_validate({**settings.model_dump(), **overrides})
    except ValidationError as e:
        raise ConfigurationError(f"Invalid settings override: {e}") from e
    previous = {name: getattr(settings, name) for name in overrides}
    for name in overrides:
        setattr(settings, name, getattr(validated, name))
    try:
        yield settings
    finally:
        for name, value in previous.items():
            setattr(settings, name, value)
