"""
Unit tests for the command-line interface.
"""

import json
import os
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest import mock

from hyperbolic_eisenstein.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    OUT_DIR_ENV,
    main,
    read_grid_csv,
)


class CliTestCase(unittest.TestCase):
    """Base class with a scratch directory for configs and outputs."""

    def setUp(self):
        """Set up a temporary directory."""
        self.tmp = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, self.tmp, ignore_errors=True)

    def write_config(self, document, name="job.json"):
        path = self.tmp / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    def run_cli(self, *args):
        with mock.patch("sys.stdout"), mock.patch("sys.stderr"):
            return main(list(args))


class TestGroupAndEval(CliTestCase):
    """The group and eval commands."""

    def setUp(self):
        """Set up a cyclic hyperbolic job on a 3x2 grid."""
        super().setUp()
        self.job = {
            "group": {"preset": "cyclic_hyperbolic", "params": [1.0]},
            "series": {"family": "hyperbolic", "c_gen": 1},
            "s_values": [1.0],
            "grid": {"x_min": -0.5, "x_max": 0.5, "y_min": 1.0, "y_max": 2.0, "nx": 3, "ny": 2},
        }

    def test_group_report(self):
        """Test that the group command writes its report."""
        config = self.write_config(self.job)
        self.assertEqual(self.run_cli("group", "--config", config, "--out", str(self.tmp)), EXIT_OK)
        report = json.loads((self.tmp / "report.json").read_text(encoding="utf-8"))
        self.assertEqual(report["rank"], 1)
        self.assertTrue(report["certificate"]["validated"])
        self.assertEqual(report["schema_version"], "1")

    def test_eval_writes_csv_and_json(self):
        """Test the CSV read-back and the dz-coefficient column."""
        config = self.write_config(self.job)
        self.assertEqual(self.run_cli("eval", "--config", config, "--out", str(self.tmp)), EXIT_OK)
        csv_text = (self.tmp / "grid.csv").read_text(encoding="utf-8")
        self.assertTrue(csv_text.startswith("# schema_version: 1\n"))
        records = read_grid_csv(self.tmp / "grid.csv")
        self.assertEqual(len(records), 6)
        for record in records:
            self.assertAlmostEqual(record.re_f, record.re_g / record.y)
            self.assertAlmostEqual(record.im_f, record.im_g / record.y)
        evaluation = json.loads((self.tmp / "report.json").read_text(encoding="utf-8"))
        self.assertEqual(evaluation["family"], "hyperbolic")
        self.assertEqual(evaluation["s"], {"re": 1.0, "im": 0.0})
        self.assertTrue(evaluation["converged"])

    def test_eval_numbers_files_per_s(self):
        """Test one file pair per s value, with threads."""
        config = self.write_config({**self.job, "s_values": [1.0, 2.0]})
        self.assertEqual(
            self.run_cli("eval", "--config", config, "--out", str(self.tmp), "--threads", "2"), EXIT_OK
        )
        for name in ("grid_0.csv", "grid_1.csv", "report_0.json", "report_1.json"):
            self.assertTrue((self.tmp / name).exists(), name)

    def test_threads_give_identical_bytes(self):
        """Test that one and four threads write the same files over several grid chunks."""
        grid = {"x_min": -0.5, "x_max": 0.5, "y_min": 1.0, "y_max": 2.0, "nx": 24, "ny": 12}
        config = self.write_config({**self.job, "grid": grid})
        outputs = []
        for threads in ("1", "4"):
            out = self.tmp / f"threads_{threads}"
            self.assertEqual(self.run_cli("eval", "--config", config, "--out", str(out), "--threads", threads), EXIT_OK)
            outputs.append([(out / name).read_bytes() for name in ("grid.csv", "report.json")])
        self.assertEqual(outputs[0], outputs[1])

    def test_out_dir_from_environment(self):
        """Test that the environment variable sets the output directory."""
        out = self.tmp / "results"
        config = self.write_config(self.job)
        with mock.patch.dict(os.environ, {OUT_DIR_ENV: str(out)}):
            self.assertEqual(self.run_cli("eval", "--config", config), EXIT_OK)
        self.assertTrue((out / "grid.csv").exists())

    def test_eval_needs_grid(self):
        """Test that eval without a grid is a configuration error."""
        job = dict(self.job)
        del job["grid"]
        self.assertEqual(self.run_cli("eval", "--config", self.write_config(job)), EXIT_CONFIG)

    def test_resolvent_needs_w(self):
        """Test that the resolvent family needs its second point."""
        job = {**self.job, "series": {"family": "resolvent"}, "s_values": [2.0]}
        self.assertEqual(
            self.run_cli("eval", "--config", self.write_config(job), "--out", str(self.tmp)), EXIT_CONFIG
        )


class TestConfigErrors(CliTestCase):
    """Exit code 2 for configuration problems."""

    def test_missing_and_invalid_files(self):
        """Test unreadable and invalid job files."""
        self.assertEqual(self.run_cli("group", "--config", str(self.tmp / "missing.json")), EXIT_CONFIG)
        bad = self.write_config({"series": {"family": "hyperbolic"}})
        self.assertEqual(self.run_cli("group", "--config", bad), EXIT_CONFIG)

    def test_group_section_checks(self):
        """Test explicit groups without generators and bad preset parameters."""
        explicit = self.write_config({"group": {"preset": "explicit"}})
        self.assertEqual(self.run_cli("group", "--config", explicit), EXIT_CONFIG)
        negative = self.write_config({"group": {"preset": "cyclic_hyperbolic", "params": [-1.0]}})
        self.assertEqual(self.run_cli("group", "--config", negative), EXIT_CONFIG)

    def test_non_discrete_group(self):
        """Test that a failed discreteness certificate exits with 2."""
        job = {"group": {"preset": "explicit", "generators": [[1.0, 1.0, 0.0, 1.0], [1.0, 0.0, 1.0, 1.0]]}}
        self.assertEqual(self.run_cli("group", "--config", self.write_config(job)), EXIT_CONFIG)

    def test_arguments(self):
        """Test bad thread counts, unknown commands and help."""
        config = self.write_config({"group": {"preset": "cyclic_parabolic"}})
        self.assertEqual(self.run_cli("group", "--config", config, "--threads", "0"), EXIT_CONFIG)
        self.assertEqual(self.run_cli("unknown", "--config", config), EXIT_CONFIG)
        self.assertEqual(self.run_cli("--help"), EXIT_OK)


class TestVerify(CliTestCase):
    """The verify command and its report."""

    def setUp(self):
        """Set up a Schottky torus job."""
        super().setUp()
        self.job = {"group": {"preset": "schottky_torus", "params": [4.0, 4.0]}, "s_values": [1.0]}

    def read_report(self):
        report = json.loads((self.tmp / "report.json").read_text(encoding="utf-8"))
        return {check["name"]: check for check in report["checks"]}

    def test_selected_checks(self):
        """Test --check selection, a passing check and an inapplicable one."""
        config = self.write_config(self.job)
        code = self.run_cli("verify", "--config", config, "--out", str(self.tmp), "--check", "collar", "--check", "l2")
        self.assertEqual(code, EXIT_OK)
        checks = self.read_report()
        self.assertEqual(set(checks), {"collar", "l2"})
        self.assertEqual(checks["collar"]["status"], "passed")
        self.assertEqual(checks["l2"]["status"], "inconclusive")

    def test_cusp_limit_grades_last_deviation(self):
        """Test that the cusp-limit check reports the raw deviation at the largest height."""
        job = {"group": {"preset": "cyclic_parabolic"}, "s_values": [2.0]}
        config = self.write_config(job)
        code = self.run_cli("verify", "--config", config, "--out", str(self.tmp), "--check", "cusp_limit")
        self.assertEqual(code, EXIT_OK)
        check = self.read_report()["cusp_limit"]
        self.assertEqual(check["status"], "passed")
        self.assertLess(check["value"], 1e-6)
        self.assertIn("noise floor", check["detail"])

    def test_tolerance_below_floor_is_inconclusive(self):
        """Test that an unresolvable tolerance does not fail the run."""
        job = {**self.job, "verify": {"checks": ["special_functions"], "tolerances": {"special_functions": 1e-20}}}
        config = self.write_config(job)
        self.assertEqual(self.run_cli("verify", "--config", config, "--out", str(self.tmp)), EXIT_OK)
        check = self.read_report()["special_functions"]
        self.assertEqual(check["status"], "inconclusive")
        self.assertEqual(check["tolerance"], 1e-20)

    def test_unknown_checks(self):
        """Test unknown checks on the command line and in the config."""
        config = self.write_config(self.job)
        self.assertEqual(self.run_cli("verify", "--config", config, "--check", "nope"), EXIT_CONFIG)
        job = {**self.job, "verify": {"checks": ["nope"]}}
        self.assertEqual(
            self.run_cli("verify", "--config", self.write_config(job), "--out", str(self.tmp)), EXIT_CONFIG
        )


class TestDegenerate(CliTestCase):
    """The degenerate command."""

    def test_sweep(self):
        """Test one table per weight with decreasing errors."""
        job = {
            "group": {"preset": "cyclic_parabolic"},
            "degenerate": {"q_values": [1, 2], "s": 3.0, "l_grid": [0.2, 0.1, 0.05]},
        }
        code = self.run_cli("degenerate", "--config", self.write_config(job), "--out", str(self.tmp))
        self.assertEqual(code, EXIT_OK)
        sweep = json.loads((self.tmp / "report.json").read_text(encoding="utf-8"))
        self.assertEqual([table["q"] for table in sweep["tables"]], [1, 2])
        for table in sweep["tables"]:
            self.assertTrue(table["monotone"])
            self.assertLess(table["sup_errors"][-1], 1e-3)


if __name__ == "__main__":
    unittest.main()
