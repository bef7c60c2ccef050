"""
Pytest configuration file providing common fixtures for tests.

This module defines fixtures that can be used across all test files:
catalog p-maps, problems with known spectra, temporary artifact stores and a
logging setup that keeps stdout free for command output.
"""
import io
import logging
import tempfile
from pathlib import Path
from typing import Generator

import pytest

from gencalc.services.pmap_service import Interval, PMap, make_builtin
from gencalc.services.storage_service import ArtifactStore
from gencalc.services.sturm_liouville_service import SLProblem, make_problem


# Logging
@pytest.fixture(autouse=True)
def reset_log_level() -> Generator[None, None, None]:
    """
    Restore the root log level after tests that run the CLI with --log-level.

    Yields:
        None
    """
    yield
    logging.getLogger().setLevel(logging.WARNING)


# Directory fixtures
@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """
    Create a temporary directory for tests.

    Yields:
        Path: The temporary directory
    """
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


@pytest.fixture
def artifact_store(temp_dir: Path) -> ArtifactStore:
    """
    Create an artifact store writing into a temporary directory.

    Args:
        temp_dir: Path to a temporary directory

    Returns:
        ArtifactStore: A store rooted at temp_dir / "artifacts"
    """
    return ArtifactStore(temp_dir / "artifacts")


@pytest.fixture
def stdout() -> io.StringIO:
    """In-memory stream standing in for stdout of a CLI run."""
    return io.StringIO()


# P-map fixtures
@pytest.fixture
def classical() -> PMap:
    """p(t, h) = t + h on [-1, 1]."""
    return make_builtin("classical")


@pytest.fixture
def khalil() -> PMap:
    """p(t, h) = t + h t^(1/2) on (0, 1]."""
    return make_builtin("khalil", 0.5)


@pytest.fixture
def katugampola() -> PMap:
    """p(t, h) = t exp(h t^(-1/2)) on (0, 1]."""
    return make_builtin("katugampola", 0.5)


@pytest.fixture
def symmetric_abs() -> PMap:
    """p(t, h) = t + |t|^(1/2) h on [-1, 1]."""
    return make_builtin("symmetric_abs", 0.5)


@pytest.fixture
def quadratic() -> PMap:
    """p(t, h) = t + h^2 on [-1, 1]."""
    return make_builtin("quadratic")


@pytest.fixture
def cubic() -> PMap:
    """p(t, h) = t + h^3 on [-1, 1]."""
    return make_builtin("cubic")


# Sturm-Liouville fixtures
@pytest.fixture
def classical_dirichlet() -> SLProblem:
    """-y'' = lambda y on [0, 1] with y(0) = y(1) = 0; lambda_n = n^2 pi^2."""
    return make_problem(make_builtin("classical", domain=Interval(0.0, 1.0)), 0.0, 1.0)


@pytest.fixture
def khalil_dirichlet() -> SLProblem:
    """Khalil alpha = 1/2 on (0, 1], Dirichlet; lambda_n = n^2 pi^2 / 4."""
    pm = make_builtin("khalil", 0.5, Interval(0.0, 1.0, open_lo=True))
    return make_problem(pm, 0.0, 1.0)
