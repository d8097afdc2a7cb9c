import io
import json
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pandas as pd

from polefinder.cli.commands import PoleFinderCLI, main


class CLITestCase(unittest.TestCase):
    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp(prefix="polefinder_cli_test_"))
        self.stdout = io.StringIO()
        self.cli = PoleFinderCLI(stdout=self.stdout)

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def simulate(self, name="x.csv", model="gegenbauer", alpha="0.6", n="1024", seed="3"):
        out = self.temp_dir / name
        code = self.cli.run(
            ["simulate", "--model", model, "--alpha", alpha, "--n", n, "--seed", seed, "--out", str(out)]
        )
        self.assertEqual(code, 0)
        return out


class TestSimulate(CLITestCase):
    def test_writes_series_and_manifest(self):
        out = self.simulate(n="256")
        lines = out.read_text().splitlines()
        self.assertEqual(lines[0], "x")
        self.assertEqual(len(lines), 257)
        self.assertTrue(all(np.isfinite(float(line)) for line in lines[1:]))
        manifest = json.loads((self.temp_dir / "x.csv.manifest.json").read_text())
        self.assertEqual(manifest["command"], "simulate")
        self.assertEqual(manifest["parameters"]["model"], "gegenbauer")
        self.assertEqual(manifest["argv"][0], "simulate")

    def test_deterministic(self):
        first = self.simulate("a.csv", n="256")
        second = self.simulate("b.csv", n="256")
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_explicit_manifest_path(self):
        manifest = self.temp_dir / "run.json"
        self.cli.run(
            ["simulate", "--model", "farima", "--alpha", "0.4", "--n", "128",
             "--out", str(self.temp_dir / "x.csv"), "--manifest", str(manifest)]
        )
        self.assertTrue(manifest.is_file())

    def test_alpha_outside_unit_interval(self):
        with patch("sys.stderr"):
            with self.assertRaises(SystemExit) as raised:
                main(["simulate", "--model", "farima", "--alpha", "1.5", "--n", "256",
                      "--out", str(self.temp_dir / "x.csv")])
        self.assertEqual(raised.exception.code, 2)
        self.assertFalse((self.temp_dir / "x.csv").exists())


class TestEstimate(CLITestCase):
    def test_json_output(self):
        series = self.simulate()
        out = self.temp_dir / "estimate.json"
        self.cli.run(["estimate", "--input", str(series), "--out", str(out), "--with-log-periodogram"])
        result = json.loads(out.read_text())
        for key in ("q_hat", "lambda_hat", "regime", "alpha_two_step", "alpha_first_stage",
                    "pole_ci", "alpha_ci", "bandwidths", "comparators"):
            self.assertIn(key, result)
        self.assertEqual(result["n"], 1024)
        self.assertEqual(result["bandwidths"]["m"], 1024 // 4)
        self.assertAlmostEqual(result["lambda_hat"], 2 * np.pi * result["q_hat"] / 1024)
        self.assertLess(abs(result["q_hat"] - 256), 40)
        self.assertTrue((self.temp_dir / "estimate.json.manifest.json").is_file())

    def test_stdout_and_csv_format(self):
        series = self.simulate()
        before = sorted(self.temp_dir.iterdir())
        with patch("tempfile.mkdtemp") as mock_mkdtemp:
            self.cli.run(["estimate", "--input", str(series), "--format", "csv"])
        mock_mkdtemp.assert_not_called()
        frame = pd.read_csv(io.StringIO(self.stdout.getvalue()))
        self.assertEqual(len(frame), 1)
        self.assertIn("alpha_ci.lower", frame.columns)
        self.assertEqual(sorted(self.temp_dir.iterdir()), before)

    def test_stdout_with_explicit_manifest(self):
        series = self.simulate()
        manifest = self.temp_dir / "run.json"
        self.cli.run(["estimate", "--input", str(series), "--manifest", str(manifest)])
        self.assertEqual(json.loads(self.stdout.getvalue())["n"], 1024)
        self.assertEqual(json.loads(manifest.read_text())["command"], "estimate")

    def test_known_pole(self):
        series = self.simulate()
        out = self.temp_dir / "estimate.json"
        self.cli.run(["estimate", "--input", str(series), "--known-pole", "1.5707963", "--out", str(out)])
        result = json.loads(out.read_text())
        self.assertEqual(result["anchor_q"], 256)
        self.assertIsNone(result["q_hat"])
        self.assertIsNone(result["pole_ci"])
        self.assertIsNotNone(result["alpha_ci"])

    def test_constant_series_exits_5(self):
        path = self.temp_dir / "constant.csv"
        path.write_text("3.0\n" * 256)
        self.assertEqual(main(["estimate", "--input", str(path), "--out", str(self.temp_dir / "e.json")]), 5)

    def test_short_series_exits_4(self):
        path = self.temp_dir / "short.csv"
        path.write_text("".join(f"{v!r}\n" for v in np.random.default_rng(0).normal(size=50)))
        self.assertEqual(main(["estimate", "--input", str(path), "--out", str(self.temp_dir / "e.json")]), 4)

    def test_auto_bandwidth_conflict_exits_2(self):
        series = self.simulate()
        code = main(["estimate", "--input", str(series), "--auto-bandwidth", "--k", "20",
                     "--out", str(self.temp_dir / "e.json")])
        self.assertEqual(code, 2)

    def test_bias_inputs_go_together(self):
        series = self.simulate()
        code = main(["estimate", "--input", str(series), "--bias-c", "1.0",
                     "--out", str(self.temp_dir / "e.json")])
        self.assertEqual(code, 2)


class TestProfile(CLITestCase):
    def test_profile_peaks_at_the_estimate(self):
        series = self.simulate()
        profile_path = self.temp_dir / "profile.csv"
        estimate_path = self.temp_dir / "estimate.json"
        self.cli.run(["profile", "--input", str(series), "--out", str(profile_path)])
        self.cli.run(["estimate", "--input", str(series), "--out", str(estimate_path)])
        frame = pd.read_csv(profile_path)
        self.assertEqual(list(frame.columns), ["q", "lambda_q", "alpha_hat"])
        self.assertEqual(len(frame), 1024 // 2 + 1)
        q_hat = json.loads(estimate_path.read_text())["q_hat"]
        self.assertEqual(int(frame["alpha_hat"].to_numpy().argmax()), q_hat)


class TestMonteCarlo(CLITestCase):
    def test_small_study(self):
        config = self.temp_dir / "study.json"
        config.write_text(json.dumps({
            "families": ["farima"],
            "alphas": [0.4],
            "ns": [256],
            "reps": 10,
            "base_seed": 3,
            "estimators": ["POLE_PSI", "TWO_STEP_AT_HAT"],
        }))
        out = self.temp_dir / "mc"
        self.cli.run(["montecarlo", "--config", str(config), "--out", str(out), "--workers", "1", "--reps", "8"])
        report = pd.read_csv(out / "report.csv")
        self.assertEqual(list(report["estimator"]), ["POLE_PSI", "TWO_STEP_AT_HAT"])
        self.assertTrue((report["reps"] == 8).all())
        for name in ("report.json", "reference_comparison.csv", "manifest.json"):
            self.assertTrue((out / name).is_file(), name)
        manifest = json.loads((out / "manifest.json").read_text())
        self.assertEqual(manifest["parameters"]["config"]["reps"], 8)

    def test_default_output_directory(self):
        config = self.temp_dir / "study.json"
        config.write_text(json.dumps({"families": ["farima"], "alphas": [0.4], "ns": [256],
                                      "reps": 2, "estimators": ["POLE_PSI"]}))
        target = self.temp_dir / "default"
        with patch("tempfile.mkdtemp", return_value=str(target)) as mock_mkdtemp:
            self.cli.run(["montecarlo", "--config", str(config)])
        mock_mkdtemp.assert_called_once_with(prefix="polefinder_mc_")
        self.assertTrue((target / "report.csv").is_file())

    def test_malformed_config_exits_2(self):
        config = self.temp_dir / "study.json"
        config.write_text(json.dumps({"families": ["farima"], "alphas": [0.4]}))
        self.assertEqual(main(["montecarlo", "--config", str(config), "--out", str(self.temp_dir / "mc")]), 2)


class TestReplay(CLITestCase):
    def test_replay_reproduces_the_output(self):
        series = self.simulate()
        out = self.temp_dir / "estimate.json"
        self.cli.run(["-v", "estimate", "--input", str(series), "--out", str(out)])
        first = out.read_bytes()
        out.unlink()
        manifest = self.temp_dir / "estimate.json.manifest.json"
        self.assertNotIn("-v", json.loads(manifest.read_text())["argv"])
        self.cli.run(["replay", str(manifest)])
        self.assertEqual(out.read_bytes(), first)

    def test_unreadable_manifest_exits_2(self):
        self.assertEqual(main(["replay", str(self.temp_dir / "absent.json")]), 2)


if __name__ == "__main__":
    unittest.main()
