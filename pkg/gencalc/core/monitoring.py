"""
Timing of solver stages.

A PerformanceMonitoringContext logs the wall time of its block on the
``gencalc.performance`` logger. Durations stay in the logs; command output never
carries them.
"""
import logging
import time
from typing import Any, Dict, Optional

PERFORMANCE_LOGGER = "gencalc.performance"


class PerformanceMonitoringContext:
    """
    Time a block and log one record when it ends.

    Successful blocks log at ``log_level``; a block left by an exception logs
    at WARNING with the exception type, and the exception propagates.

    Attributes:
        duration_ms: Wall time of the block, set on exit
    """

    def __init__(
        self,
        operation_name: str,
        logger_instance: Optional[logging.Logger] = None,
        log_level: int = logging.INFO,
        **context: Any,
    ):
        self.operation_name = operation_name
        self.logger = logger_instance or logging.getLogger(PERFORMANCE_LOGGER)
        self.log_level = log_level
        self.context = context
        self.duration_ms = 0.0
        self._start = 0.0

    def _data(self, **fields: Any) -> Dict[str, Any]:
        return {"operation": self.operation_name, **self.context, **fields}

    def __enter__(self) -> "PerformanceMonitoringContext":
        self._start = time.perf_counter()
        self.logger.debug(f"Starting {self.operation_name}", extra={"extra": self._data()})
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> bool:
        self.duration_ms = (time.perf_counter() - self._start) * 1000
        if exc_type is None:
            self.logger.log(
                self.log_level,
                f"{self.operation_name} succeeded in {self.duration_ms:.2f}ms",
                extra={"extra": self._data(duration_ms=self.duration_ms, success=True)},
            )
        else:
            data = self._data(
                duration_ms=self.duration_ms,
                success=False,
                error_type=exc_type.__name__,
                error=str(exc_val),
            )
            self.logger.warning(
                f"{self.operation_name} failed after {self.duration_ms:.2f}ms: {exc_val}",
                extra={"extra": data},
            )
        return False


def monitor_performance_context(
    operation_name: str, **context: Any
) -> PerformanceMonitoringContext:
    """Shorthand for PerformanceMonitoringContext with the default logger and level."""
    return PerformanceMonitoringContext(operation_name, **context)
