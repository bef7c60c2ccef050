"""Services package for gencalc."""
from .storage_service import ArtifactStore, dump_csv, to_json

__all__ = [
    "ArtifactStore",
    "dump_csv",
    "to_json",
]
