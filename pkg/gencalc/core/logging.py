"""
Logging setup for gencalc.

Records go to stderr, as JSON lines or plain text, because stdout carries the
results of CLI commands. Solver metrics are emitted on the ``gencalc.metrics``
logger and operation timings on ``gencalc.performance``.
"""
import json
import logging
import socket
import sys
import traceback
from datetime import datetime
from functools import wraps
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from gencalc.core.config import settings
from gencalc.core.monitoring import PerformanceMonitoringContext

PLAIN_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Record attributes copied into the JSON document when present
_CONTEXT_ATTRS = ("run_id", "duration_ms")

_QUIET_LIBRARIES = ("numpy", "scipy")


def _json_default(value: Any) -> Any:
    """Serialise numpy scalars and arrays; anything else through str()."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class JSONFormatter(logging.Formatter):
    """
    One JSON object per record.

    Args:
        include_hostname: Add the host name to every record
        **static_fields: Fields added verbatim to every record
    """

    def __init__(self, include_hostname: bool = True, **static_fields: Any):
        super().__init__()
        self.hostname = socket.gethostname() if include_hostname else None
        self.static_fields = static_fields

    def format(self, record: logging.LogRecord) -> str:
        doc: Dict[str, Any] = {
            "timestamp": datetime.now().isoformat(),
            "level": record.levelname,
            "message": record.getMessage(),
            "logger": record.name,
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno,
            "process_id": record.process,
        }
        if self.hostname is not None:
            doc["hostname"] = self.hostname
        doc.update(self.static_fields)

        payload = getattr(record, "extra", None)
        if isinstance(payload, dict):
            doc.update(payload)
        for attr in _CONTEXT_ATTRS:
            if hasattr(record, attr):
                doc[attr] = getattr(record, attr)

        if record.exc_info and record.exc_info[0] is not None:
            exc_type, exc, tb = record.exc_info
            doc["exception"] = {
                "type": exc_type.__name__,
                "message": str(exc),
                "traceback": traceback.format_exception(exc_type, exc, tb),
            }
        return json.dumps(doc, default=_json_default)


class RunAdapter(logging.LoggerAdapter):
    """Stamps every record with the id of one CLI invocation."""

    def __init__(self, logger: logging.Logger, run_id: str):
        super().__init__(logger, {"run_id": run_id})
        self.run_id = run_id

    def process(self, msg, kwargs):
        kwargs.setdefault("extra", {})["run_id"] = self.run_id
        return msg, kwargs


def _formatter() -> logging.Formatter:
    return JSONFormatter() if settings.LOG_FORMAT_JSON else logging.Formatter(PLAIN_FORMAT)


def _file_handler(log_file: Path) -> logging.Handler:
    log_file.parent.mkdir(parents=True, exist_ok=True)
    handler: logging.Handler
    if settings.LOG_ROTATION_TYPE == "size":
        handler = RotatingFileHandler(
            log_file, maxBytes=settings.LOG_MAX_SIZE, backupCount=settings.LOG_BACKUP_COUNT
        )
    else:
        handler = TimedRotatingFileHandler(
            log_file,
            when=settings.LOG_ROTATION_WHEN,
            interval=settings.LOG_ROTATION_INTERVAL,
            backupCount=settings.LOG_BACKUP_COUNT,
        )
    # files are always JSON
    handler.setFormatter(JSONFormatter())
    return handler


def build_handlers() -> List[logging.Handler]:
    """
    Handlers for the current settings: stderr, plus a rotating file when
    ENABLE_FILE_LOGGING is set.
    """
    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(_formatter())
    handlers: List[logging.Handler] = [console]
    log_file = settings.log_file()
    if log_file is not None:
        handlers.append(_file_handler(log_file))
    return handlers


def configure_logging(level: Optional[str] = None) -> None:
    """
    Replace the root handlers with those of the current settings.

    Args:
        level: Level name overriding settings.LOG_LEVEL
    """
    root = logging.getLogger()
    level_name = (level or settings.LOG_LEVEL).upper()
    root.setLevel(getattr(logging, level_name, logging.WARNING))
    for handler in list(root.handlers):
        root.removeHandler(handler)
    for handler in build_handlers():
        root.addHandler(handler)
    for name in _QUIET_LIBRARIES:
        logging.getLogger(name).setLevel(logging.WARNING)
    logging.getLogger(__name__).debug(f"Logging configured with level {level_name}")


def get_run_logger(run_id: str) -> logging.LoggerAdapter:
    """Logger for one CLI invocation."""
    return RunAdapter(logging.getLogger("gencalc.run"), run_id)


class MetricsLogger:
    """
    Structured solver metrics.

    Each method emits one record on ``gencalc.metrics`` whose ``extra`` mapping
    holds the numbers; the message is a readable summary of them.
    """

    def __init__(self):
        self.logger = logging.getLogger("gencalc.metrics")

    def _emit(self, level: int, message: str, data: Dict[str, Any]) -> None:
        self.logger.log(level, message, extra={"extra": data})

    def log_derivative(
        self, pmap_label: str, t: float, method: str, outcome: str, estimated_error: float
    ) -> None:
        """One generalized derivative evaluation."""
        self._emit(
            logging.DEBUG,
            f"D_p at t={t:.6g} via {method}: {outcome}",
            {
                "pmap": pmap_label,
                "t": t,
                "method": method,
                "outcome": outcome,
                "estimated_error": estimated_error,
            },
        )

    def log_hypotheses(self, pmap_label: str, flags: Dict[str, bool]) -> None:
        failed = [name for name, ok in flags.items() if not ok]
        message = (
            f"Hypotheses failing for {pmap_label}: {', '.join(failed)}"
            if failed
            else f"All hypotheses hold for {pmap_label}"
        )
        self._emit(logging.INFO, message, {"pmap": pmap_label, **flags})

    def log_eigenvalue_search(
        self,
        side: str,
        found: int,
        requested: int,
        window: Sequence[float],
        duration_ms: float,
    ) -> None:
        """One branch of a spectrum; window is the lambda range that was scanned."""
        self._emit(
            logging.INFO if found == requested else logging.WARNING,
            f"Eigenvalue search ({side}) found {found}/{requested} in {duration_ms:.2f}ms",
            {
                "side": side,
                "found": found,
                "requested": requested,
                "window": list(window),
                "duration_ms": duration_ms,
            },
        )

    def log_simulation(
        self,
        kind: str,
        samples: int,
        duration_ms: float,
        residuals: Optional[Dict[str, float]] = None,
    ) -> None:
        data: Dict[str, Any] = {"kind": kind, "samples": samples, "duration_ms": duration_ms}
        data.update(residuals or {})
        message = f"Simulation {kind} produced {samples} samples in {duration_ms:.2f}ms"
        self._emit(logging.INFO, message, data)

    def log_fixture(
        self, name: str, passed: bool, duration_ms: float, detail: Optional[str] = None
    ) -> None:
        """A verification fixture; failures are warnings."""
        data: Dict[str, Any] = {"fixture": name, "passed": passed, "duration_ms": duration_ms}
        if detail:
            data["detail"] = detail
        if passed:
            self._emit(logging.INFO, f"Fixture {name} passed in {duration_ms:.2f}ms", data)
        else:
            self._emit(logging.WARNING, f"Fixture {name} FAILED: {detail}", data)


metrics_logger = MetricsLogger()


def get_metrics_logger() -> MetricsLogger:
    return metrics_logger


def monitor_performance(operation_name: Optional[str] = None) -> Callable:
    """
    Decorator timing every call of a function on ``gencalc.performance``.

    Args:
        operation_name: Name logged for the operation; the function name by default
    """

    def decorator(func):
        name = operation_name or func.__name__

        @wraps(func)
        def wrapper(*args, **kwargs):
            with PerformanceMonitoringContext(name):
                return func(*args, **kwargs)

        return wrapper

    return decorator
