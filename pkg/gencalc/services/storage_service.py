"""
Artifact storage for gencalc.

Sampled curves go to CSV files and structured results to JSON files inside one
output directory. Every CSV written here reads back into the object that
produced it.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, TextIO, Tuple, Union

import numpy as np
from pydantic import BaseModel

from gencalc.core.errors import ConfigurationError
from gencalc.services.mechanics_service import Trajectory
from gencalc.services.sturm_liouville_service import EigenFunction

logger = logging.getLogger(__name__)

_FLOAT_FORMAT = "%.17g"
_META_PREFIX = "# "


def _write_rows(
    handle: TextIO, meta: Dict[str, Any], header: Iterable[str], matrix: np.ndarray
) -> None:
    for key, value in meta.items():
        handle.write(f"{_META_PREFIX}{key}={value}\n")
    handle.write(",".join(header) + "\n")
    np.savetxt(handle, matrix, delimiter=",", fmt=_FLOAT_FORMAT)


Artifact = Union[Trajectory, EigenFunction]


def dump_csv(artifact: Artifact, handle: TextIO) -> None:
    """
    Write a trajectory or eigenfunction as CSV to an open text stream.

    Trajectories carry their kind in the preamble; eigenfunctions carry lambda,
    the residual and the oscillation count.
    """
    if isinstance(artifact, EigenFunction):
        meta = {
            "lam": repr(float(artifact.lam)),
            "residual": repr(float(artifact.residual)),
            "oscillations": int(artifact.oscillations),
        }
        matrix = np.column_stack([artifact.t, artifact.y, artifact.Dy])
        _write_rows(handle, meta, ("t", "y", "Dy"), matrix)
        return
    columns = artifact.columns()
    matrix = np.column_stack(list(columns.values()))
    _write_rows(handle, {"kind": artifact.kind}, columns.keys(), matrix)


def _read_csv(path: Path) -> Tuple[Dict[str, str], List[str], np.ndarray]:
    meta: Dict[str, str] = {}
    with open(path, "r") as f:
        line = f.readline()
        while line.startswith(_META_PREFIX.strip()):
            key, _, value = line[len(_META_PREFIX):].rstrip("\n").partition("=")
            meta[key] = value
            line = f.readline()
        header = line.strip().split(",")
        matrix = np.loadtxt(f, delimiter=",", ndmin=2)
    if matrix.shape[1] != len(header):
        raise ConfigurationError(
            f"{path} has {matrix.shape[1]} columns but {len(header)} header names"
        )
    return meta, header, matrix


class ArtifactStore:
    """Service for writing and re-reading run artifacts."""

    def __init__(self, out_dir: Union[str, Path]):
        """
        Initialize the store.

        Args:
            out_dir: Output directory, created when missing
        """
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        logger.debug(f"Artifact store at {self.out_dir}")

    def path(self, filename: str) -> Path:
        return self.out_dir / filename

    def write_artifact(self, artifact: Artifact, name: str) -> Path:
        """
        Write a trajectory (columns t, tau when known, then the states) or an
        eigenfunction (columns t, y, Dy) as name.csv.

        Returns:
            Path of the written file
        """
        path = self.path(f"{name}.csv")
        with open(path, "w") as f:
            dump_csv(artifact, f)
        logger.info(f"Wrote {artifact.t.size} samples to {path}")
        return path

    def read_trajectory(self, path: Union[str, Path]) -> Trajectory:
        """
        Read a trajectory CSV written by write_artifact.

        Raises:
            ConfigurationError: If the file lacks a t column
        """
        meta, header, matrix = _read_csv(Path(path))
        if not header or header[0] != "t":
            raise ConfigurationError(f"{path} is not a trajectory file: first column must be t")
        has_tau = len(header) > 1 and header[1] == "tau"
        first_state = 2 if has_tau else 1
        return Trajectory(
            t=matrix[:, 0],
            states=matrix[:, first_state:],
            labels=tuple(header[first_state:]),
            tau=matrix[:, 1] if has_tau else None,
            kind=meta.get("kind", ""),
        )

    def read_eigenfunction(self, path: Union[str, Path]) -> EigenFunction:
        """
        Read eigenfunction samples written by write_artifact.

        Raises:
            ConfigurationError: If the preamble or the columns are missing
        """
        meta, header, matrix = _read_csv(Path(path))
        if header != ["t", "y", "Dy"] or "lam" not in meta:
            raise ConfigurationError(f"{path} is not an eigenfunction file")
        return EigenFunction(
            lam=float(meta["lam"]),
            t=matrix[:, 0],
            y=matrix[:, 1],
            Dy=matrix[:, 2],
            residual=float(meta.get("residual", "nan")),
            oscillations=int(meta.get("oscillations", "0")),
        )

    def write_summary(self, result: Union[BaseModel, Dict[str, Any]], name: str) -> Path:
        """Write a JSON summary with sorted keys."""
        path = self.path(f"{name}.json")
        with open(path, "w") as f:
            f.write(to_json(result))
            f.write("\n")
        logger.info(f"Wrote summary to {path}")
        return path

    def read_summary(self, name: str) -> Optional[Dict[str, Any]]:
        """The JSON summary called name, or None when it does not exist."""
        path = self.path(f"{name}.json")
        if not path.exists():
            return None
        with open(path, "r") as f:
            return json.load(f)


def to_json(result: Union[BaseModel, Dict[str, Any]]) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation."""
    data = result.model_dump(mode="json") if isinstance(result, BaseModel) else result
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=True)
