"""
Entry point of the gencalc command line.

Parses and validates the invocation, runs the subcommand with any tolerance
overrides in force, and writes the JSON summary to stdout with optional CSV
artifacts. Failures print an ErrorResponse document and set the exit code:
2 for configuration errors, 1 for numerical failures.
"""
import logging
import sys
import time
import uuid
from typing import List, Optional, TextIO

from pydantic import ValidationError

from gencalc.cli.commands import HANDLERS, CommandOutput
from gencalc.cli.parser import ParsedRun, build_parser, request_from_args
from gencalc.core.config import override_settings
from gencalc.core.errors import ConfigurationError, GencalcError
from gencalc.core.logging import configure_logging, get_run_logger
from gencalc.core.models import ErrorResponse
from gencalc.services.storage_service import ArtifactStore, dump_csv, to_json

logger = logging.getLogger(__name__)


def _primary(output: CommandOutput):
    if not output.artifacts:
        raise ConfigurationError("This command produces no sampled result to write as CSV")
    return next(iter(output.artifacts.values()))


def _record_artifacts(output: CommandOutput, names: List[str]) -> None:
    if hasattr(output.summary, "artifacts"):
        output.summary.artifacts = names


def write_output(parsed: ParsedRun, output: CommandOutput, stdout: TextIO) -> None:
    """
    Write artifacts and the summary.

    --out ending in .csv receives the primary artifact; any other --out is a
    directory receiving every artifact and <command>.json. stdout gets the
    JSON summary, or the primary artifact as CSV with --format csv.

    Raises:
        ConfigurationError: If a CSV is requested from a command without artifacts
    """
    out = parsed.out
    if out is not None and out.suffix.lower() == ".csv":
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w") as f:
            dump_csv(_primary(output), f)
        _record_artifacts(output, [out.name])
    elif out is not None:
        store = ArtifactStore(out)
        names = [store.write_artifact(a, name).name for name, a in output.artifacts.items()]
        _record_artifacts(output, names)
        store.write_summary(output.summary, parsed.command)

    if parsed.output_format == "csv":
        dump_csv(_primary(output), stdout)
    else:
        stdout.write(to_json(output.summary))
        stdout.write("\n")


def _error_document(e: Exception, exit_code: int) -> ErrorResponse:
    if isinstance(e, ValidationError):
        context = {
            "errors": [
                {"loc": [str(part) for part in err["loc"]], "msg": err["msg"], "type": err["type"]}
                for err in e.errors()
            ]
        }
        detail = f"Invalid run configuration: {e.error_count()} validation error(s)"
    else:
        context = getattr(e, "details", {})
        detail = str(e)
    return ErrorResponse(
        detail=detail, error_type=type(e).__name__, exit_code=exit_code, context=context
    )


def run(argv: Optional[List[str]] = None, stdout: Optional[TextIO] = None) -> int:
    """
    Run one gencalc invocation.

    Args:
        argv: Arguments without the program name; sys.argv[1:] when omitted
        stdout: Stream for results; sys.stdout when omitted

    Returns:
        Process exit code
    """
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    run_id = str(uuid.uuid4())
    try:
        parsed = request_from_args(args)
        configure_logging(parsed.log_level)
        run_logger = get_run_logger(run_id)
        start_time = time.perf_counter()
        run_logger.info(
            f"Run started: {parsed.command}",
            extra={"extra": {"command": parsed.command, "overrides": parsed.overrides}},
        )
        with override_settings(**parsed.overrides):
            output = HANDLERS[parsed.command](parsed.request)
            write_output(parsed, output, stdout)
        duration_ms = (time.perf_counter() - start_time) * 1000
        run_logger.info(
            f"Run completed: {parsed.command} in {duration_ms:.2f}ms",
            extra={"extra": {"exit_code": output.exit_code, "duration_ms": duration_ms}},
        )
        return output.exit_code
    except (ConfigurationError, ValidationError) as e:
        logger.error(f"Invalid configuration: {e}")
        document = _error_document(e, 2)
    except GencalcError as e:
        logger.error(f"{type(e).__name__}: {e}", extra={"extra": e.details})
        document = _error_document(e, e.exit_code)
    except Exception as e:
        logger.exception(f"Unexpected failure in run {run_id}")
        document = _error_document(e, 1)
    stdout.write(to_json(document))
    stdout.write("\n")
    return document.exit_code


def main() -> None:
    """Console script entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
