"""
Tests for structured logging and performance monitoring.
"""
import json
import logging
import sys

import pytest

import numpy as np

from gencalc.core.logging import (
    JSONFormatter,
    RunAdapter,
    build_handlers,
    get_metrics_logger,
    monitor_performance,
)
from gencalc.core.monitoring import PerformanceMonitoringContext


def _record(msg: str = "hello", **attrs) -> logging.LogRecord:
    record = logging.LogRecord("gencalc.test", logging.INFO, __file__, 10, msg, None, None)
    for key, value in attrs.items():
        setattr(record, key, value)
    return record


@pytest.mark.unit
class TestJSONFormatter:
    """Tests for the JSON formatter."""

    def test_basic_fields(self):
        """Level, message and logger name are always present."""
        data = json.loads(JSONFormatter(include_hostname=False).format(_record()))
        assert data["level"] == "INFO"
        assert data["message"] == "hello"
        assert data["logger"] == "gencalc.test"
        assert "hostname" not in data

    def test_extra_and_run_id(self):
        """The extra mapping and the run id are merged into the document."""
        record = _record(extra={"command": "sl", "n": 5}, run_id="abc")
        data = json.loads(JSONFormatter(include_hostname=False, service="gencalc").format(record))
        assert data["command"] == "sl"
        assert data["n"] == 5
        assert data["run_id"] == "abc"
        assert data["service"] == "gencalc"

    def test_exception_info(self):
        """Exceptions are serialised with their type."""
        try:
            raise ValueError("bad")
        except ValueError:
            record = _record(exc_info=sys.exc_info())
        data = json.loads(JSONFormatter(include_hostname=False).format(record))
        assert data["exception"]["type"] == "ValueError"
        assert data["exception"]["message"] == "bad"

    def test_numpy_values(self):
        """numpy scalars and arrays in the extra mapping serialise as plain JSON."""
        record = _record(extra={"lam": np.float64(9.5), "counts": np.arange(3)})
        data = json.loads(JSONFormatter(include_hostname=False).format(record))
        assert data["lam"] == 9.5
        assert data["counts"] == [0, 1, 2]


@pytest.mark.unit
class TestRunContext:
    """Tests for run adapters, metrics and timing."""

    def test_run_adapter_adds_id(self, caplog):
        """Every record of the adapter carries the run id."""
        adapter = RunAdapter(logging.getLogger("gencalc.run"), "run-1")
        with caplog.at_level(logging.INFO, logger="gencalc.run"):
            adapter.info("started")
        assert caplog.records[-1].run_id == "run-1"

    def test_fixture_failure_is_a_warning(self, caplog):
        """Failed fixtures are logged at WARNING with their detail."""
        with caplog.at_level(logging.INFO, logger="gencalc.metrics"):
            get_metrics_logger().log_fixture("units", False, 1.0, "off by one")
        record = caplog.records[-1]
        assert record.levelno == logging.WARNING
        assert record.extra["detail"] == "off by one"

    def test_performance_context_times_block(self):
        """duration_ms is set on exit."""
        with PerformanceMonitoringContext("block") as ctx:
            sum(range(1000))
        assert ctx.duration_ms >= 0.0

    def test_performance_context_propagates(self, caplog):
        """Exceptions propagate and are logged as failures."""
        with caplog.at_level(logging.WARNING, logger="gencalc.performance"):
            with pytest.raises(KeyError):
                with PerformanceMonitoringContext("block"):
                    raise KeyError("missing")
        assert caplog.records[-1].extra["error_type"] == "KeyError"

    def test_monitor_performance_decorator(self, caplog):
        """The decorator logs the operation name and returns the result unchanged."""

        @monitor_performance("double")
        def double(x):
            return 2 * x

        with caplog.at_level(logging.INFO, logger="gencalc.performance"):
            assert double(4) == 8
        record = caplog.records[-1]
        assert record.extra["operation"] == "double"
        assert record.extra["success"] is True

    def test_console_handler_only_by_default(self, monkeypatch):
        """Without file logging there is a single stderr handler."""
        monkeypatch.setattr("gencalc.core.config.settings.ENABLE_FILE_LOGGING", False)
        handlers = build_handlers()
        assert len(handlers) == 1
        assert handlers[0].stream is sys.stderr
