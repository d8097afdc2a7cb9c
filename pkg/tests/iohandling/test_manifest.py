import json
import shutil
import tempfile
import unittest
from pathlib import Path

import polefinder
from polefinder.errors import ConfigError
from polefinder.iohandling.manifest import RunManifest, manifest_path_for


class TestRunManifest(unittest.TestCase):
    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp(prefix="polefinder_manifest_test_"))

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_written_and_read_back(self):
        manifest = RunManifest(
            command="simulate",
            parameters={"model": "farima", "alpha": 0.4},
            argv=["simulate", "--model", "farima"],
        )
        path = manifest.to_json(self.temp_dir / "m.json")
        data = json.loads(path.read_text())
        self.assertEqual(data["version"], polefinder.__version__)
        self.assertEqual(data["schema_version"], 1)
        self.assertTrue(data["timestamp"].endswith("+00:00"))
        self.assertEqual(RunManifest.from_json(path), manifest)

    def test_version_mismatch_warns(self):
        path = RunManifest("profile", {}, ["profile"], version="0.0.1").to_json(self.temp_dir / "m.json")
        with self.assertLogs("polefinder.iohandling.manifest", level="WARNING"):
            self.assertEqual(RunManifest.from_json(path).version, "0.0.1")

    def test_unreadable(self):
        with self.assertRaises(ConfigError):
            RunManifest.from_json(self.temp_dir / "absent.json")
        bad = self.temp_dir / "bad.json"
        bad.write_text("{")
        with self.assertRaises(ConfigError):
            RunManifest.from_json(bad)
        bad.write_text(json.dumps({"command": "simulate", "colour": "red"}))
        with self.assertRaises(ConfigError):
            RunManifest.from_json(bad)

    def test_manifest_path_for(self):
        self.assertEqual(manifest_path_for(self.temp_dir / "x.csv"), self.temp_dir / "x.csv.manifest.json")
        self.assertEqual(manifest_path_for(self.temp_dir), self.temp_dir / "manifest.json")


if __name__ == "__main__":
    unittest.main()
