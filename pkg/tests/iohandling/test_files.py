import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np
from numpy.testing import assert_array_equal

from polefinder.errors import ConfigError, DomainError, NonFiniteInput
from polefinder.estimation.estimators import alpha_profile
from polefinder.iohandling import files
from polefinder.spectral.periodogram import averaged_periodogram, periodogram
from polefinder.spectral.weights import PSI_PAPER, WeightId


class TestReadSeries(unittest.TestCase):
    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp(prefix="polefinder_files_test_"))

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def write(self, name, text):
        path = self.temp_dir / name
        path.write_text(text)
        return path

    def test_headerless(self):
        series = files.read_series(self.write("x.csv", "1.5\n-2\n3e-1\n"))
        assert_array_equal(series.values, [1.5, -2.0, 0.3])

    def test_header_is_detected(self):
        series = files.read_series(self.write("x.csv", "x\n1.5\n-2\n"))
        assert_array_equal(series.values, [1.5, -2.0])

    def test_column_by_name_and_position(self):
        named = self.write("named.csv", "t,x\n0,1.0\n1,2.0\n")
        assert_array_equal(files.read_series(named, "x").values, [1.0, 2.0])
        plain = self.write("plain.csv", "0,1.0\n1,2.0\n")
        assert_array_equal(files.read_series(plain, "1").values, [1.0, 2.0])

    def test_several_columns_need_a_choice(self):
        path = self.write("named.csv", "t,x\n0,1.0\n1,2.0\n")
        with self.assertRaises(ConfigError):
            files.read_series(path)
        with self.assertRaises(ConfigError):
            files.read_series(path, "y")

    def test_non_numeric_cell(self):
        with self.assertRaises(NonFiniteInput):
            files.read_series(self.write("x.csv", "x\n1.0\noops\n2.0\n"))

    def test_missing_and_empty(self):
        with self.assertRaises(DomainError):
            files.read_series(self.temp_dir / "absent.csv")
        with self.assertRaises(DomainError):
            files.read_series(self.write("empty.csv", ""))


class TestWriters(unittest.TestCase):
    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp(prefix="polefinder_files_test_"))

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_series_is_exact(self):
        values = np.random.default_rng(4).normal(size=64)
        path = files.write_series(self.temp_dir / "x.csv", values)
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "x")
        self.assertEqual(len(lines), 65)
        assert_array_equal(files.read_series(path).values, values)
        assert_array_equal(files.read_series(path, "x").values, values)

    def test_profile(self):
        values = np.random.default_rng(5).normal(size=256)
        profile = alpha_profile(averaged_periodogram(periodogram(values), 6), 9, PSI_PAPER)
        path = files.write_profile(self.temp_dir / "profile.csv", profile)
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], "q,lambda_q,alpha_hat")
        self.assertEqual(len(lines), 1 + 256 // 2 + 1)
        frame = files.profile_frame(profile)
        self.assertEqual(list(frame["q"][:3]), [0, 1, 2])
        self.assertAlmostEqual(frame["lambda_q"].iloc[-1], np.pi)

    @patch("tempfile.mkdtemp")
    def test_default_output_dir(self, mock_mkdtemp):
        mock_mkdtemp.return_value = str(self.temp_dir)
        self.assertEqual(files.default_output_dir("polefinder_mc_"), str(self.temp_dir))
        mock_mkdtemp.assert_called_once_with(prefix="polefinder_mc_")


class TestWeightTable(unittest.TestCase):
    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp(prefix="polefinder_files_test_"))

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_linear_table(self):
        u = np.linspace(0.05, 0.95, 19)
        path = self.temp_dir / "w.csv"
        path.write_text("u,value\n" + "".join(f"{a!r},{0.5 - a!r}\n" for a in u))
        spec = files.load_weight_table(path)
        self.assertIs(spec.id, WeightId.USER_TABULATED)
        self.assertAlmostEqual(float(spec.func(0.25)), 0.25, places=10)

    def test_one_column(self):
        path = self.temp_dir / "w.csv"
        path.write_text("0.1\n0.2\n")
        with self.assertRaises(ConfigError):
            files.load_weight_table(path)

    def test_non_numeric(self):
        path = self.temp_dir / "w.csv"
        path.write_text("0.1,0.4\n0.2,x\n0.3,0.2\n0.4,0.1\n")
        with self.assertRaises(ConfigError):
            files.load_weight_table(path)


if __name__ == "__main__":
    unittest.main()
