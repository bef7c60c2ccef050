"""
Tests for the gencalc command line: parsing, exit codes and output files.
"""
import argparse
import io
import json
import logging
import math

import pytest

from gencalc.cli.parser import _function_arg, build_parser, request_from_args
from gencalc.core.config import settings
from gencalc.core.models import SimulateRequest, UnitsRequest
from gencalc.main import run


def run_json(argv, stdout):
    """Run the CLI and parse its stdout."""
    code = run(argv, stdout)
    return code, json.loads(stdout.getvalue())


@pytest.mark.cli
class TestParser:
    """Tests for argument parsing and request validation."""

    def test_function_argument(self):
        """NUMBER or NAME[:SHIFT[:SCALE]]."""
        assert _function_arg("3") == {"name": "constant", "value": 3.0}
        assert _function_arg("sgn_right:0.5") == {"name": "sgn_right", "shift": 0.5}
        assert _function_arg("sin:0.5:2") == {"name": "sin", "shift": 0.5, "scale": 2.0}
        with pytest.raises(argparse.ArgumentTypeError):
            _function_arg("sin:a")
        with pytest.raises(argparse.ArgumentTypeError):
            _function_arg("sin:1:2:3")

    def test_units_request(self):
        """Flags validate into the request model."""
        args = build_parser().parse_args(
            ["units", "--value", "3", "--unit", "m/s", "--alpha", "0.99"]
        )
        parsed = request_from_args(args)
        assert isinstance(parsed.request, UnitsRequest)
        assert parsed.request.alpha == 0.99
        assert parsed.output_format == "json"
        assert parsed.out is None

    def test_config_file_with_flag_precedence(self, temp_dir):
        """--config supplies fields, flags win."""
        config = temp_dir / "run.json"
        config.write_text(json.dumps({"value": 3.0, "unit": "m/s", "alpha": 0.5, "format": "json"}))
        args = build_parser().parse_args(["units", "--config", str(config), "--alpha", "0.99"])
        parsed = request_from_args(args)
        assert parsed.request.alpha == 0.99
        assert parsed.request.value == 3.0

    def test_simulate_drag_alpha(self):
        """--alpha of simulate drag sets the drag order, not a p-map."""
        args = build_parser().parse_args(["simulate", "drag", "--alpha", "0.3", "--t-end", "4"])
        request = request_from_args(args).request
        assert isinstance(request, SimulateRequest)
        assert request.pmap is None
        assert request.drag.alpha == 0.3
        assert request.drag.t_end == 4.0

    def test_sl_coefficients(self):
        """Coefficient flags become function descriptors."""
        args = build_parser().parse_args(
            ["sl", "--pmap", "classical", "--interval", "0", "1", "--w", "sgn_right:0.5"]
        )
        request = request_from_args(args).request
        assert request.w.name == "sgn_right"
        assert request.w.shift == 0.5
        assert request.pmap.family == "classical"

    def test_tolerance_overrides(self):
        """Tolerance flags are collected by settings name."""
        args = build_parser().parse_args(
            ["verify", "--richardson-depth", "6", "--sl-eta", "1e-8", "--only", "units"]
        )
        parsed = request_from_args(args)
        assert parsed.overrides == {"RICHARDSON_DEPTH": 6, "SL_ETA": 1e-8}


@pytest.mark.cli
class TestExitCodes:
    """Tests for run exit codes and error documents."""

    def test_missing_command(self, stdout):
        """argparse usage errors exit with 2."""
        assert run([], stdout) == 2

    def test_help(self, stdout):
        """--help exits with 0."""
        assert run(["--help"], stdout) == 0

    def test_units(self, stdout):
        """3 m/s at alpha = 0.99 converts to 2.38 m/sec^0.99."""
        code, data = run_json(["units", "--value", "3", "--unit", "m/s", "--alpha", "0.99"], stdout)
        assert code == 0
        assert round(data["magnitude"], 2) == 2.38
        assert data["unit_string"] == "m/sec^0.99"

    def test_validation_error(self, stdout):
        """alpha > 1 fails request validation."""
        code, data = run_json(["units", "--value", "3", "--unit", "m/s", "--alpha", "2"], stdout)
        assert code == 2
        assert data["error_type"] == "ValidationError"
        assert data["exit_code"] == 2
        assert data["context"]["errors"][0]["loc"] == ["alpha"]

    def test_missing_field(self, stdout):
        """A missing unit is a validation error."""
        code, data = run_json(["units", "--value", "3", "--alpha", "0.5"], stdout)
        assert code == 2
        assert data["error_type"] == "ValidationError"

    def test_unreadable_config(self, stdout, temp_dir):
        """A config file that is not a JSON object exits with 2."""
        config = temp_dir / "bad.json"
        config.write_text("[1, 2]")
        code, data = run_json(["units", "--config", str(config)], stdout)
        assert code == 2
        assert data["error_type"] == "ConfigurationError"

    def test_unknown_function(self, stdout):
        """Unknown builtin functions are configuration errors."""
        code, data = run_json(["deriv", "--pmap", "classical", "--fn", "tan", "--t", "0"], stdout)
        assert code == 2
        assert data["error_type"] == "ConfigurationError"

    def test_unknown_family(self, stdout):
        """Unknown p-map families fail request validation before dispatch."""
        code, data = run_json(["deriv", "--pmap", "nope", "--fn", "sin", "--t", "0"], stdout)
        assert code == 2
        assert data["error_type"] == "ValidationError"
        assert data["context"]["errors"][0]["loc"][-1] == "family"

    def test_pmap_alpha_out_of_range(self, stdout):
        """A p-map alpha above 1 fails request validation before dispatch."""
        argv = ["deriv", "--pmap", "khalil", "--alpha", "1.5", "--fn", "square", "--t", "0.25"]
        code, data = run_json(argv, stdout)
        assert code == 2
        assert data["error_type"] == "ValidationError"
        assert data["context"]["errors"][0]["loc"][-1] == "alpha"

    def test_outside_domain(self, stdout):
        """Evaluation outside the domain exits with 1 and a diagnostic."""
        argv = ["deriv", "--pmap", "khalil", "--alpha", "0.5", "--fn", "square", "--t", "-1"]
        code, data = run_json(argv, stdout)
        assert code == 1
        assert data["error_type"] == "DomainError"
        assert "outside the domain" in data["detail"]

    def test_csv_without_artifacts(self, stdout):
        """--format csv needs a sampled result."""
        argv = ["units", "--value", "3", "--unit", "m/s", "--alpha", "0.5", "--format", "csv"]
        code, data = run_json(argv, stdout)
        assert code == 2
        assert "no sampled result" in data["detail"]

    def test_overrides_restored(self, stdout):
        """Tolerance flags apply to one run only."""
        depth = settings.RICHARDSON_DEPTH
        argv = "deriv --pmap classical --fn sin --t 0.2 --richardson-depth 6".split()
        assert run(argv, stdout) == 0
        assert settings.RICHARDSON_DEPTH == depth

    def test_log_level(self, stdout):
        """--log-level sets the root level for the run."""
        argv = ["units", "--value", "1", "--unit", "m/s", "--alpha", "1", "--log-level", "debug"]
        assert run(argv, stdout) == 0
        assert logging.getLogger().level == logging.DEBUG


@pytest.mark.cli
class TestCommands:
    """Tests for the subcommand outputs."""

    def test_deriv(self, stdout):
        """D t^2 = 2 t^(3/2) under khalil 1/2, which is 1/4 at t = 1/4."""
        argv = ["deriv", "--pmap", "khalil", "--alpha", "0.5", "--fn", "square", "--t", "0.25"]
        code, data = run_json(argv, stdout)
        assert code == 0
        assert data["result"]["value"] == pytest.approx(0.25, abs=1e-6)
        assert data["result"]["method"] == "limit"
        assert data["hypotheses"] is None

    def test_deriv_not_differentiable(self, stdout):
        """|t| at 0 is an outcome, not an error."""
        argv = ["deriv", "--pmap", "classical", "--fn", "abs", "--t", "0"]
        code, data = run_json(argv, stdout)
        assert code == 0
        assert data["result"]["outcome"] == "not_p_differentiable"
        assert data["result"]["value"] is None

    def test_deriv_lift_with_hypotheses(self, stdout):
        """--method lift and --hypotheses."""
        argv = "deriv --pmap khalil --alpha 0.5 --fn sin --t 0.36 --method lift --hypotheses"
        code, data = run_json(argv.split(), stdout)
        assert code == 0
        assert data["result"]["value"] == pytest.approx(0.6 * math.cos(0.36))
        assert data["hypotheses"]["h1_plus"] is True
        assert data["hypotheses"]["ratio_condition"] == "assumed"

    def test_sl(self, stdout):
        """lambda_n = n^2 pi^2 for the classical Dirichlet problem."""
        argv = ["sl", "--pmap", "classical", "--interval", "0", "1", "--n", "2"]
        code, data = run_json(argv, stdout)
        assert code == 0
        spectrum = data["spectrum"]
        assert spectrum["lambda_plus"] == pytest.approx([math.pi**2, 4 * math.pi**2], rel=1e-8)
        assert spectrum["lambda_minus"] == []

    def test_sl_eigenfunctions_to_directory(self, stdout, temp_dir):
        """--out DIR receives one CSV per eigenfunction and sl.json."""
        out = temp_dir / "run"
        argv = "sl --pmap classical --interval 0 1 --n 2 --eigenfunctions 50 --out".split()
        argv.append(str(out))
        code, data = run_json(argv, stdout)
        assert code == 0
        assert data["artifacts"] == ["eigenfunction_plus_1.csv", "eigenfunction_plus_2.csv"]
        assert (out / "eigenfunction_plus_2.csv").exists()
        assert json.loads((out / "sl.json").read_text())["artifacts"] == data["artifacts"]
        assert set(data["eigenfunction_residuals"]) == {
            "eigenfunction_plus_1",
            "eigenfunction_plus_2",
        }

    def test_simulate_csv_to_stdout(self, stdout):
        """--format csv streams the trajectory."""
        argv = "simulate gravity --pmap khalil --alpha 0.5 --samples 11 --format csv".split()
        assert run(argv, stdout) == 0
        lines = stdout.getvalue().splitlines()
        assert lines[0] == "# kind=gravity"
        assert lines[1] == "t,tau,x,y,Dx,Dy"
        assert len(lines) == 13

    def test_simulate_out_csv_file(self, stdout, temp_dir):
        """--out FILE.csv receives the primary artifact."""
        target = temp_dir / "nested" / "cf.csv"
        argv = "simulate central-force --pmap khalil --alpha 0.5 --t-end 2 --samples 50 --out"
        argv = argv.split() + [str(target)]
        code, data = run_json(argv, stdout)
        assert code == 0
        assert target.exists()
        assert data["artifacts"] == ["cf.csv"]
        assert data["diagnostics"]["ellipse_residual"] < 1e-10
        assert data["diagnostics"]["equation_residual"] < 1e-5
        assert data["diagnostics"]["tau_end"] == pytest.approx(2.0 * math.sqrt(2.0))

    def test_simulate_drag(self, stdout):
        """The drag summary reports the terminal velocity."""
        argv = ["simulate", "drag", "--sigma", "1", "--samples", "20"]
        code, data = run_json(argv, stdout)
        assert code == 0
        assert data["diagnostics"]["terminal_velocity"] == pytest.approx(math.sqrt(2 * 9.8))
        assert data["diagnostics"]["max_residual"] < 1e-8

    def test_simulate_nbody_directory(self, stdout, temp_dir):
        """Both parameterizations are written."""
        argv = ["simulate", "nbody", "--t-end", "1", "--dt-tau", "0.01", "--out", str(temp_dir)]
        code, data = run_json(argv, stdout)
        assert code == 0
        assert data["artifacts"] == ["nbody_t.csv", "nbody_tau.csv"]
        assert (temp_dir / "simulate.json").exists()

    def test_verify_subset(self, stdout):
        """Fixtures run in registration order."""
        argv = ["verify", "--only", "units", "wrong_chain_rule"]
        code, data = run_json(argv, stdout)
        assert code == 0
        assert data["passed"] is True
        assert [f["name"] for f in data["fixtures"]] == ["wrong_chain_rule", "units"]

    def test_verify_unknown_fixture(self, stdout):
        """Unknown fixture names exit with 2."""
        code, data = run_json(["verify", "--only", "nope"], stdout)
        assert code == 2
        assert "Unknown fixtures" in data["detail"]

    def test_output_is_deterministic(self):
        """Two runs print the same document."""
        argv = ["verify", "--only", "units", "calculus_rules", "--jobs", "2"]
        first, second = io.StringIO(), io.StringIO()
        assert run(argv, first) == run(argv, second) == 0
        assert first.getvalue() == second.getvalue()
