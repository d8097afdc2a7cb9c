"""
files.py - Reading and writing the CSV files used by the command line.

Series files hold one value per line, with an optional header that is detected
from a non-numeric first line. Machine outputs are written with 17
significant digits.

Example:
    from polefinder.iohandling.files import read_series, write_series

    series = read_series("x.csv")
    write_series("copy.csv", series.values)
"""
import logging
import tempfile
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from polefinder.errors import ConfigError, DomainError
from polefinder.estimation.estimators import AlphaProfile
from polefinder.spectral.periodogram import TimeSeries
from polefinder.spectral.weights import WeightSpec, tabulated_weight

log = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
PROFILE_COLUMNS = ["q", "lambda_q", "alpha_hat"]
SERIES_COLUMN = "x"

PathLike = Union[str, Path]


def default_output_dir(prefix: str = "polefinder_") -> str:
    """A fresh temporary directory for runs that were not given an output path."""
    return tempfile.mkdtemp(prefix=prefix)


def _has_header(path: PathLike) -> bool:
    first = pd.read_csv(path, header=None, nrows=1, dtype=str, skip_blank_lines=True)
    numeric = pd.to_numeric(first.iloc[0], errors="coerce")
    return bool(numeric.isna().any())


def read_table(path: PathLike) -> pd.DataFrame:
    """
    Read a CSV whose header line is optional.

    Raises:
        DomainError: If the file does not exist or holds no data.
    """
    if not Path(path).is_file():
        raise DomainError(f"Input file {path} does not exist.")
    try:
        header = 0 if _has_header(path) else None
        return pd.read_csv(path, header=header)
    except pd.errors.EmptyDataError:
        raise DomainError(f"Input file {path} is empty.")


def _select_column(frame: pd.DataFrame, column: Optional[str], path: PathLike) -> pd.Series:
    if column is None:
        if frame.shape[1] != 1:
            raise ConfigError(
                f"{path} has {frame.shape[1]} columns; choose one with --column "
                f"(available: {[str(c) for c in frame.columns]})."
            )
        return frame.iloc[:, 0]
    if column in frame.columns:
        return frame[column]
    if column.isdigit() and int(column) < frame.shape[1]:
        return frame.iloc[:, int(column)]
    raise ConfigError(
        f"Column {column!r} not found in {path}; available: {[str(c) for c in frame.columns]}."
    )


def read_series(path: PathLike, column: Optional[str] = None) -> TimeSeries:
    """
    Load one column of a CSV file as a TimeSeries.

    Args:
        path: CSV file, with or without a header line.
        column: Column name, or 0-based position. Required when the file has
            more than one column.

    Returns:
        TimeSeries: Non-numeric cells become NaN and are rejected as non-finite.
    """
    values = pd.to_numeric(_select_column(read_table(path), column, path), errors="coerce")
    series = TimeSeries(values.to_numpy(dtype=float))
    log.debug("Read %s observations from %s", series.n, path)
    return series


def write_series(path: PathLike, values: np.ndarray) -> Path:
    """Write a series as one column headed ``x``, one value per line."""
    path = Path(path)
    pd.DataFrame({SERIES_COLUMN: np.asarray(values)}).to_csv(
        path, index=False, float_format=FLOAT_FORMAT
    )
    return path


def profile_frame(profile: AlphaProfile) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "q": np.arange(profile.values.size),
            "lambda_q": profile.lambdas,
            "alpha_hat": profile.values,
        },
        columns=PROFILE_COLUMNS,
    )


def write_profile(path: PathLike, profile: AlphaProfile) -> Path:
    path = Path(path)
    profile_frame(profile).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def load_weight_table(path: PathLike) -> WeightSpec:
    """
    Build a tabulated weight from a two-column CSV of (u, value) nodes.

    The first column is read as u and the second as the weight value, whether
    or not the file has a header.
    """
    frame = read_table(path)
    if frame.shape[1] < 2:
        raise ConfigError(f"Weight table {path} needs two columns (u, value).")
    u = pd.to_numeric(frame.iloc[:, 0], errors="coerce").to_numpy(dtype=float)
    values = pd.to_numeric(frame.iloc[:, 1], errors="coerce").to_numpy(dtype=float)
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(values))):
        raise ConfigError(f"Weight table {path} contains non-numeric entries.")
    spec = tabulated_weight(u, values)
    log.debug("Loaded a %s-node weight table from %s", u.size, path)
    return spec
