"""
Argument parsing for the gencalc command line.

Each subcommand validates into the pydantic request model of core.models. A
JSON file given with --config supplies the same fields; flags given on the
command line take precedence over it.
"""
import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Type

from pydantic import BaseModel

from gencalc.core.errors import ConfigurationError
from gencalc.core.models import (
    CentralForceSpec,
    DerivRequest,
    DragSpec,
    GravitySpec,
    NBodySpec,
    SimulateRequest,
    SLRequest,
    UnitsRequest,
    VerifyRequest,
)

COMMANDS = ("deriv", "sl", "simulate", "units", "verify")
SIMULATIONS = {
    "central-force": ("central_force", CentralForceSpec),
    "gravity": ("gravity", GravitySpec),
    "drag": ("drag", DragSpec),
    "nbody": ("nbody", NBodySpec),
}
OUTPUT_FORMATS = ("json", "csv")

# Flags overriding a settings field for one run: flag -> (field, type, help)
TOLERANCE_FLAGS = {
    "--deriv-base-step": ("DERIV_BASE_STEP", float, "Base step factor of difference quotients"),
    "--richardson-depth": ("RICHARDSON_DEPTH", int, "Richardson extrapolation depth"),
    "--ph-rtol": ("PH_RTOL", float, "Agreement of numeric p_h(t,0) estimates"),
    "--bisection-depth": ("BISECTION_DEPTH", int, "Depth of the hypothesis bracket grid"),
    "--quad-rtol": ("QUAD_REFINE_RTOL", float, "Agreement of quadrature refinements"),
    "--sl-eta": ("SL_ETA", float, "Width of the jump across singular points"),
    "--lambda-max": ("SL_LAMBDA_MAX", float, "Ceiling of the eigenvalue scan"),
    "--ode-rtol": ("ODE_RTOL", float, "Relative tolerance of ODE integration"),
    "--ode-atol": ("ODE_ATOL", float, "Absolute tolerance of ODE integration"),
    "--time-change-tol": ("TIME_CHANGE_TOL", float, "Interpolation tolerance of the tau grid"),
    "--mechanics-epsilon": ("MECHANICS_EPSILON", float, "First sample time of fractional runs"),
    "--nbody-min-step": ("NBODY_MIN_STEP", float, "Smallest accepted n-body substep"),
}


@dataclass
class ParsedRun:
    """A validated invocation."""

    command: str
    request: BaseModel
    out: Optional[Path] = None
    output_format: str = "json"
    overrides: Dict[str, Any] = field(default_factory=dict)
    log_level: Optional[str] = None


def _function_arg(text: str) -> Dict[str, Any]:
    """NUMBER for a constant, or NAME[:SHIFT[:SCALE]] for scale * NAME(t - SHIFT)."""
    try:
        return {"name": "constant", "value": float(text)}
    except ValueError:
        pass
    parts = text.split(":")
    if len(parts) > 3 or not parts[0]:
        raise argparse.ArgumentTypeError(f"expected NUMBER or NAME[:SHIFT[:SCALE]], got {text!r}")
    try:
        spec: Dict[str, Any] = {"name": parts[0]}
        if len(parts) > 1:
            spec["shift"] = float(parts[1])
        if len(parts) > 2:
            spec["scale"] = float(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid shift or scale in {text!r}") from None
    return spec


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", type=Path, help="JSON run configuration")
    parent.add_argument(
        "--out",
        type=Path,
        help="Artifact directory, or a .csv file receiving the primary sampled result",
    )
    parent.add_argument(
        "--format",
        dest="output_format",
        choices=OUTPUT_FORMATS,
        default=None,
        help="Write the JSON summary (default) or the primary CSV to stdout",
    )
    parent.add_argument("--log-level", help="Override GENCALC_LOG_LEVEL for this run")
    tolerances = parent.add_argument_group("tolerances")
    for flag, (dest, kind, text) in TOLERANCE_FLAGS.items():
        tolerances.add_argument(flag, dest=dest, type=kind, default=None, help=text)
    return parent


def _pmap_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("p-map")
    group.add_argument("--pmap", dest="family", help="Catalog family, e.g. khalil")
    group.add_argument("--alpha", type=float, help="Fractional order in (0, 1]")
    group.add_argument("--domain", type=float, nargs=2, metavar=("LO", "HI"))
    group.add_argument("--open-lo", action="store_const", const=True, default=None)
    group.add_argument("--open-hi", action="store_const", const=True, default=None)
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Build the gencalc argument parser."""
    common, pmap = _common_parent(), _pmap_parent()
    parser = argparse.ArgumentParser(
        prog="gencalc",
        description="Generalized derivatives, Sturm-Liouville spectra and mechanics",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    deriv = sub.add_parser("deriv", parents=[common, pmap], help="Generalized derivative")
    deriv.add_argument("--fn", help="Builtin function name")
    deriv.add_argument("--t", type=float, help="Evaluation point")
    deriv.add_argument("--method", choices=("limit", "lift"))
    deriv.add_argument("--base-step", type=float)
    deriv.add_argument("--depth", type=int)
    deriv.add_argument(
        "--hypotheses",
        action="store_const",
        const=True,
        default=None,
        help="Also check H1+-, H2 and continuity",
    )

    sl = sub.add_parser("sl", parents=[common, pmap], help="Sturm-Liouville spectrum")
    sl.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"))
    for name in ("P", "q", "w"):
        sl.add_argument(
            f"--{name}", type=_function_arg, metavar="NUMBER|NAME[:SHIFT[:SCALE]]"
        )
    sl.add_argument("--bc", choices=("dirichlet", "neumann", "custom"))
    sl.add_argument("--mu", type=float, help="Boundary angle at a (custom bc)")
    sl.add_argument("--nu", type=float, help="Boundary angle at b (custom bc)")
    sl.add_argument("--n", type=int, help="Eigenvalues per side")
    sl.add_argument("--breakpoints", type=float, nargs="*")
    sl.add_argument(
        "--eigenfunctions",
        dest="eigenfunction_samples",
        type=int,
        help="Export each eigenfunction with this many samples",
    )

    simulate = sub.add_parser("simulate", parents=[common, pmap], help="Mechanics simulation")
    simulate.add_argument("kind", choices=tuple(SIMULATIONS))
    simulate.add_argument("--t-end", type=float)
    simulate.add_argument("--samples", type=int)
    for flag in ("--k", "--mass", "--x0", "--y0", "--dx0", "--dy0", "--u0", "--v0", "--g"):
        simulate.add_argument(flag, type=float)
    simulate.add_argument("--method", choices=("auto", "quadrature", "closed_form"))
    for flag in ("--m", "--C", "--rho", "--A", "--sigma"):
        simulate.add_argument(flag, type=float)
    simulate.add_argument("--G", type=float)
    simulate.add_argument("--dt-tau", type=float)

    units = sub.add_parser("units", parents=[common], help="Alpha-second conversion")
    units.add_argument("--value", type=float)
    units.add_argument("--unit", help="m/s or m/s2")
    units.add_argument("--alpha", type=float)
    units.add_argument("--sigma", type=float, help="Cosmic time factor")

    verify = sub.add_parser("verify", parents=[common], help="Run the verification fixtures")
    verify.add_argument("--jobs", type=int, help="Fixtures evaluated in parallel")
    verify.add_argument("--only", nargs="+", help="Restrict to these fixtures")
    verify.add_argument("--seed", type=int)
    return parser


def load_config(path: Path) -> Dict[str, Any]:
    """
    Read a JSON run configuration.

    Raises:
        ConfigurationError: If the file cannot be read or is not a JSON object
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"Config {path} must hold a JSON object")
    return data


def _given(args: argparse.Namespace, names: List[str]) -> Dict[str, Any]:
    return {n: getattr(args, n) for n in names if getattr(args, n, None) is not None}


def _merge_pmap(data: Dict[str, Any], args: argparse.Namespace) -> None:
    flags = _given(args, ["family", "alpha", "domain", "open_lo", "open_hi"])
    if flags:
        data["pmap"] = {**(data.get("pmap") or {}), **flags}


def _fields(model: Type[BaseModel]) -> List[str]:
    return list(model.model_fields)


def request_from_args(args: argparse.Namespace) -> ParsedRun:
    """
    Merge --config with explicit flags and validate the request.

    Raises:
        ConfigurationError: If the config file is unreadable
        pydantic.ValidationError: If the merged request is invalid
    """
    data = load_config(args.config) if args.config else {}
    out = args.out or (Path(data["out"]) if data.get("out") else None)
    output_format = args.output_format or data.get("format") or "json"
    data.pop("out", None)
    data.pop("format", None)
    if output_format not in OUTPUT_FORMATS:
        raise ConfigurationError(f"format must be one of {OUTPUT_FORMATS}")

    command = args.command
    request: BaseModel
    if command == "deriv":
        _merge_pmap(data, args)
        data.update(_given(args, ["fn", "t", "method", "base_step", "depth", "hypotheses"]))
        request = DerivRequest.model_validate(data)
    elif command == "sl":
        _merge_pmap(data, args)
        names = [n for n in _fields(SLRequest) if n != "pmap"]
        data.update(_given(args, names))
        request = SLRequest.model_validate(data)
    elif command == "simulate":
        _merge_pmap(data, args)
        key, spec = SIMULATIONS[args.kind]
        data["kind"] = args.kind
        flags = _given(args, _fields(spec))
        if key == "drag" and args.alpha is not None:
            flags["alpha"] = args.alpha
            data.pop("pmap", None)
        if flags:
            data[key] = {**(data.get(key) or {}), **flags}
        request = SimulateRequest.model_validate(data)
    elif command == "units":
        data.update(_given(args, _fields(UnitsRequest)))
        request = UnitsRequest.model_validate(data)
    else:
        data.update(_given(args, _fields(VerifyRequest)))
        request = VerifyRequest.model_validate(data)

    overrides = {
        dest: getattr(args, dest)
        for dest, _, _ in TOLERANCE_FLAGS.values()
        if getattr(args, dest, None) is not None
    }
    return ParsedRun(
        command=command,
        request=request,
        out=out,
        output_format=output_format,
        overrides=overrides,
        log_level=args.log_level,
    )
