"""Command-line tests for ``fowler``.

These tests auto-skip when pydantic / pydantic-settings (the ``cli`` extra)
are unavailable in the current environment.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO
from pathlib import Path
from typing import Any
from unittest.mock import patch

import numpy as np

from fowler_core.errors import InvalidGrid
from fowler_core.model import derive_params, spherical_state
from fowler_core.sim.synthetic import log_radii, spherical_grid
from fowler_core.transform import CylinderGrid

CLI_AVAILABLE = True
try:
    from pydantic import ValidationError

    from fowler_cli import io
    from fowler_cli.main import build_parser, main
    from fowler_cli.models import ConstantsReport, RunConfig
    from fowler_cli.settings import FowlerSettings
except Exception:
    CLI_AVAILABLE = False

PARAMS = derive_params(6)
FIXTURES = Path(__file__).parent / "fixtures"


def run_cli(*argv: str) -> tuple[int, str, str]:
    out, err = StringIO(), StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class TempDirTestCase(unittest.TestCase):
    def setUp(self) -> None:
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.tmp = Path(tmp.name)

    def path(self, name: str) -> str:
        return str(self.tmp / name)

    def write_config(self, payload: dict[str, Any], name: str = "run.json") -> str:
        path = self.path(name)
        Path(path).write_text(json.dumps(payload), encoding="utf-8")
        return path


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestConstantsCommand(unittest.TestCase):
    def test_json(self) -> None:
        code, out, _ = run_cli("constants", "--n", "6")
        self.assertEqual(code, 0)
        payload = json.loads(out)
        self.assertEqual(payload["K0"], 9.0)
        self.assertEqual(payload["K2"], 10.0)
        self.assertEqual(payload["c"], 24.0)
        self.assertEqual(payload["char_roots"], [-3.0, -1.0, 1.0, 3.0])
        self.assertAlmostEqual(payload["linearized_period"], 3.7481, places=3)

    def test_csv(self) -> None:
        code, out, _ = run_cli("constants", "--n", "6", "--p", "2", "--format", "csv")
        self.assertEqual(code, 0)
        header, row = list(csv.reader(StringIO(out)))
        self.assertEqual(header[:3], ["n", "p", "c"])
        self.assertEqual(header[-4:], [f"char_root_{k}" for k in range(1, 5)])
        self.assertEqual(row[1], "2")
        self.assertEqual(float(row[header.index("a0")]), PARAMS.a0)

    def test_matches_golden_file(self) -> None:
        golden = (FIXTURES / "constants_n6.json").read_bytes()
        code, out, _ = run_cli("constants", "--n", "6")
        self.assertEqual(code, 0)
        self.assertEqual(out.encode("utf-8"), golden)

    def test_output_is_deterministic(self) -> None:
        self.assertEqual(run_cli("constants", "--n", "7"), run_cli("constants", "--n", "7"))

    def test_small_dimension(self) -> None:
        code, _, err = run_cli("constants", "--n", "4")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("ERROR DimensionTooSmall:"))

    def test_unknown_flag_is_a_usage_error(self) -> None:
        code, out, err = run_cli("constants", "--n", "6", "--bogus")
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertEqual(err, "ERROR UsageError: fowler: unrecognized arguments: --bogus\n")

    def test_missing_required_option_is_a_usage_error(self) -> None:
        code, _, err = run_cli("constants")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("ERROR UsageError: fowler constants: "))
        self.assertEqual(err.count("\n"), 1)

    def test_report_model(self) -> None:
        report = ConstantsReport.from_params(PARAMS)
        self.assertEqual(report.csv_row()["char_root_4"], 3.0)
        self.assertNotIn("char_roots", report.csv_row())


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestIntegrateCommand(TempDirTestCase):
    def test_backward_bubble_run(self) -> None:
        trajectory = self.path("bubble.csv")
        invariants = self.path("bubble.json")
        config = self.write_config(
            {
                "n": 6,
                "mu": 1.0,
                "t_start": 10.0,
                "t_end": 0.0,
                "dt": 0.01,
                "out_trajectory": trajectory,
                "out_invariants": invariants,
            }
        )
        code, _, err = run_cli("integrate", "--config", config)
        self.assertEqual(code, 0, err)

        with open(trajectory, newline="", encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["t", "v_1", "d1_1", "d2_1", "d3_1", "H"])
        self.assertEqual(len(rows), 1002)
        self.assertEqual(float(rows[1][0]), 10.0)
        self.assertEqual(float(rows[-1][0]), 0.0)
        self.assertAlmostEqual(float(rows[-1][1]), 1.0, delta=1e-6)

        events = json.loads(Path(self.path("bubble.events.json")).read_text(encoding="utf-8"))
        self.assertEqual(events["terminal"], "Completed")
        report = json.loads(Path(invariants).read_text(encoding="utf-8"))
        self.assertEqual(
            set(report), {"H0", "max_drift", "pohozaev_cyl", "pohozaev_sph", "monitors"}
        )
        self.assertLess(abs(report["H0"]), 1e-12)
        self.assertTrue(report["monitors"]["bound"]["pass"])

    def test_missing_config(self) -> None:
        code, _, err = run_cli("integrate", "--config", self.path("absent.json"))
        self.assertEqual(code, 2)
        self.assertIn("ERROR InvalidRunConfig", err)

    def test_malformed_json(self) -> None:
        path = self.path("broken.json")
        Path(path).write_text("{not json", encoding="utf-8")
        code, _, err = run_cli("integrate", "--config", path)
        self.assertEqual(code, 2)
        self.assertIn("not valid JSON", err)

    def test_unknown_method(self) -> None:
        config = self.write_config({"n": 6, "mu": 1.0, "method": "euler"})
        code, _, err = run_cli("integrate", "--config", config)
        self.assertEqual(code, 2)
        self.assertIn("ERROR InvalidRunConfig", err)
        self.assertIn("method", err)


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestRunConfig(unittest.TestCase):
    def test_lambda_alias(self) -> None:
        config = RunConfig.model_validate({"n": 6, "p": 2, "mu": 1.0, "lambda": [1, 1]})
        self.assertEqual(config.lam, [1.0, 1.0])
        state = config.initial_state(derive_params(6, 2))
        np.testing.assert_allclose(state.v, [2**-0.5, 2**-0.5])

    def test_selector_rules(self) -> None:
        bad = [
            {"n": 6},
            {"n": 6, "mu": 1.0, "a": 0.5},
            {"n": 6, "mu": 1.0, "b": 0.5},
            {"n": 6, "init": [1.0, 0.0, 0.0]},
            {"n": 6, "p": 2, "mu": 1.0, "lambda": [1.0]},
            {"n": 6, "mu": 1.0, "lambda": [0.0]},
            {"n": 6, "mu": 1.0, "t_end": 0.0},
            {"n": 6, "mu": 1.0, "dt": 0.0},
            {"n": 6, "mu": 1.0, "colour": "blue"},
        ]
        for payload in bad:
            with self.assertRaises(ValidationError, msg=str(payload)):
                RunConfig.model_validate(payload)

    def test_initial_states(self) -> None:
        bubble = RunConfig(n=6, mu=1.0, t_start=-2.0).initial_state(PARAMS)
        np.testing.assert_allclose(bubble.y, spherical_state(PARAMS, 1.0, -2.0).y)
        explicit = RunConfig(n=6, init=[0.5, 0.0, 0.1, 0.0]).initial_state(PARAMS)
        np.testing.assert_array_equal(explicit.y, [0.5, 0.0, 0.1, 0.0])
        even = RunConfig(n=6, a=PARAMS.a0).initial_state(PARAMS)
        np.testing.assert_array_equal(even.y, [PARAMS.a0, 0.0, 0.0, 0.0])

    def test_stepper_config(self) -> None:
        cfg = RunConfig(n=6, mu=1.0, method="RK45", abs_tol=1e-8).stepper_config()
        self.assertEqual(cfg.method, "dopri45")
        self.assertEqual(cfg.abs_tol, 1e-8)


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestClassifyCommand(TempDirTestCase):
    def test_spherical_grid(self) -> None:
        grid_path = self.path("grid.csv")
        io.write_radial_grid(grid_path, spherical_grid(PARAMS, 1.0, log_radii(1e-3, 1e3, 2001)))
        report_path = self.path("report.json")
        code, _, err = run_cli("classify", "--input", grid_path, "--n", "6", "--out", report_path)
        self.assertEqual(code, 0, err)
        report = json.loads(Path(report_path).read_text(encoding="utf-8"))
        self.assertEqual(report["verdict"], "NonSingularSpherical")

    def test_too_few_decades(self) -> None:
        grid_path = self.path("short.csv")
        io.write_radial_grid(grid_path, spherical_grid(PARAMS, 1.0, log_radii(0.1, 10.0, 200)))
        code, _, err = run_cli("classify", "--input", grid_path, "--n", "6")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("ERROR InsufficientSpan:"))

    def test_unreadable_grid(self) -> None:
        path = self.path("bad.csv")
        Path(path).write_text("x,u_1\n1,2\n", encoding="utf-8")
        code, _, err = run_cli("classify", "--input", path, "--n", "6")
        self.assertEqual(code, 2)
        self.assertIn("ERROR InvalidGrid", err)
        code, _, err = run_cli("classify", "--input", self.path("absent.csv"), "--n", "6")
        self.assertEqual(code, 2)


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestDelaunayAndAtlasCommands(TempDirTestCase):
    def test_delaunay_export(self) -> None:
        trajectory, row, radial = self.path("d.csv"), self.path("d.json"), self.path("r.csv")
        code, _, err = run_cli(
            "delaunay",
            "--n",
            "6",
            "--a",
            "0.6",
            "--relative",
            "--samples",
            "101",
            "--out-trajectory",
            trajectory,
            "--out-row",
            row,
            "--out-radial",
            radial,
            "--radial-points",
            "50",
        )
        self.assertEqual(code, 0, err)
        payload = json.loads(Path(row).read_text(encoding="utf-8"))
        self.assertAlmostEqual(payload["a"], 0.6 * PARAMS.a0, places=14)
        self.assertLess(payload["H"], 0.0)
        self.assertLessEqual(payload["residual"], 1e-6)
        self.assertEqual(len(io.read_radial_grid(radial)), 50)

    def test_atlas_bounds_are_validated(self) -> None:
        out = self.path("atlas.csv")
        code, _, err = run_cli(
            "atlas", "--n", "6", "--a-min", "0.9", "--a-max", "0.3", "--relative", "--out", out
        )
        self.assertEqual(code, 2)
        self.assertIn("ERROR InvalidRunConfig", err)
        code, _, err = run_cli(
            "atlas", "--n", "6", "--a-min", "0.5", "--a-max", "1.5", "--relative", "--out", out
        )
        self.assertEqual(code, 2)
        self.assertIn("ERROR NecksizeOutOfRange", err)
        self.assertFalse(Path(out).exists())


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestVerifyCommand(TempDirTestCase):
    def test_single_suite(self) -> None:
        out = self.path("verify.json")
        code, stdout, _ = run_cli("verify", "--suite", "sech_residual", "--out", out)
        self.assertEqual(code, 0)
        self.assertTrue(stdout.startswith("PASS sech-residual"))
        (result,) = json.loads(Path(out).read_text(encoding="utf-8"))
        self.assertTrue(result["pass"])

    def test_unknown_suite(self) -> None:
        code, _, err = run_cli("verify", "--suite", "bogus")
        self.assertEqual(code, 2)
        self.assertIn("ERROR UnknownSuite", err)


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestSettings(unittest.TestCase):
    def test_threads_from_environment(self) -> None:
        with patch.dict(os.environ, {"FOWLER_THREADS": "3"}):
            settings = FowlerSettings()
        self.assertEqual(settings.worker_count(), 3)
        self.assertEqual(settings.worker_count(5), 5)

    def test_default_worker_count(self) -> None:
        with patch.dict(os.environ, {}, clear=True):
            self.assertGreaterEqual(FowlerSettings().worker_count(), 1)

    def test_invalid_environment(self) -> None:
        for env in ({"FOWLER_THREADS": "0"}, {"FOWLER_LOG_LEVEL": "loud"}):
            with patch.dict(os.environ, env):
                code, _, err = run_cli("constants", "--n", "6")
            self.assertEqual(code, 2, env)
            self.assertIn("ERROR InvalidRunConfig", err)

    def test_log_level_normalized(self) -> None:
        with patch.dict(os.environ, {"FOWLER_LOG_LEVEL": "info"}):
            self.assertEqual(FowlerSettings().log_level, "INFO")

    def test_parser_lists_subcommands(self) -> None:
        help_text = build_parser().format_help()
        for command in ("constants", "integrate", "delaunay", "atlas", "classify", "verify"):
            self.assertIn(command, help_text)


@unittest.skipUnless(CLI_AVAILABLE, "CLI runtime dependencies are not installed")
class TestFileFormats(TempDirTestCase):
    def test_float_cells_round_trip_exactly(self) -> None:
        self.assertEqual(float(io.format_float(PARAMS.a0)), PARAMS.a0)
        text = io.render_rows(["x", "flag", "missing"], [[0.1, True, None]])
        self.assertEqual(text, "x,flag,missing\n0.10000000000000001,true,\n")

    def test_radial_grid_file(self) -> None:
        path = self.path("grid.csv")
        grid = spherical_grid(derive_params(6, 2), 1.0, log_radii(0.1, 10.0, 20), lam=[1, 2])
        io.write_radial_grid(path, grid)
        self.assertTrue(Path(path).read_text(encoding="utf-8").startswith("r,u_1,u_2\n"))
        back = io.read_radial_grid(path)
        np.testing.assert_array_equal(back.values, grid.values)

    def test_cylinder_grid_file(self) -> None:
        path = self.path("cyl.csv")
        grid = CylinderGrid(np.linspace(-1.0, 1.0, 21), np.cos(np.linspace(-1.0, 1.0, 21)))
        io.write_cylinder_grid(path, grid)
        back = io.read_cylinder_grid(path)
        np.testing.assert_array_equal(back.times, grid.times)
        np.testing.assert_array_equal(back.values, grid.values)

    def test_empty_and_ragged_tables(self) -> None:
        empty = self.path("empty.csv")
        Path(empty).write_text("", encoding="utf-8")
        ragged = self.path("ragged.csv")
        Path(ragged).write_text("r,u_1\n1,2\n3\n", encoding="utf-8")
        for path in (empty, ragged):
            with self.assertRaises(InvalidGrid):
                io.read_radial_grid(path)

    def test_events_path(self) -> None:
        self.assertEqual(io.events_path("out/orbit.csv"), Path("out/orbit.events.json"))


if __name__ == "__main__":
    unittest.main()
