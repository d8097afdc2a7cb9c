"""
Aggregated Monte Carlo results and their CSV/JSON renderings.
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

CSV_COLUMNS = ["family", "lambda0", "alpha", "n", "estimator", "bias", "sd", "mse", "reps"]
REPORT_SCHEMA_VERSION = 1
MACHINE_FLOAT_FORMAT = "%.17g"
# Run-dependent fields left out of the JSON report.
TIMING_FIELDS = ("wall_time",)


@dataclass(frozen=True)
class CellRecord:
    """
    Bias, sample standard deviation (reps - 1 divisor) and MSE of one estimator
    in one design cell. ``mse`` equals bias^2 + sd^2 (reps - 1) / reps, i.e. the
    mean squared error about the truth. Pole estimators are measured in
    Fourier-index units. ``wall_time`` is informational and stays out of
    comparisons and of the JSON report, which is byte-identical across runs
    with the same seed.
    """

    family: str
    lambda0: float
    alpha: float
    n: int
    estimator: str
    bias: float
    sd: float
    mse: float
    reps: int
    wall_time: float = field(default=0.0, compare=False)
    sd_defined: bool = True


def summarize(
    errors: np.ndarray,
    family: str,
    lambda0: float,
    alpha: float,
    n: int,
    estimator: str,
    wall_time: float = 0.0,
) -> CellRecord:
    """Aggregate estimate-minus-truth errors of one estimator, in replication order."""
    reps = int(errors.size)
    bias = float(np.mean(errors))
    if reps > 1:
        sd = float(np.std(errors, ddof=1))
        sd_defined = True
    else:
        sd = 0.0
        sd_defined = False
        log.warning("Cell %s/%s/%s/%s has one replication; sd set to 0", family, alpha, n, estimator)
    mse = bias**2 + sd**2 * (reps - 1) / reps
    return CellRecord(
        family=family,
        lambda0=lambda0,
        alpha=alpha,
        n=n,
        estimator=estimator,
        bias=bias,
        sd=sd,
        mse=mse,
        reps=reps,
        wall_time=wall_time,
        sd_defined=sd_defined,
    )


@dataclass
class MCReport:
    records: List[CellRecord] = field(default_factory=list)
    provenance: Dict = field(default_factory=dict)
    aborted: List[Dict] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        rows = [{column: getattr(r, column) for column in CSV_COLUMNS} for r in self.records]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def record(self, family: str, alpha: float, n: int, estimator: str) -> Optional[CellRecord]:
        for r in self.records:
            if (r.family, r.alpha, r.n, r.estimator) == (family, alpha, n, estimator):
                return r
        return None

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format=MACHINE_FLOAT_FORMAT)
        return path

    def to_dict(self) -> Dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "provenance": self.provenance,
            "records": [
                {key: value for key, value in asdict(r).items() if key not in TIMING_FIELDS}
                for r in self.records
            ],
            "aborted": self.aborted,
        }

    def to_json(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        return path

    def summary_lines(self) -> List[str]:
        """Human-readable table with 4 significant digits."""
        lines = [f"{'family':<12}{'alpha':>7}{'n':>6}  {'estimator':<20}{'bias':>11}{'sd':>11}{'mse':>11}"]
        for r in self.records:
            lines.append(
                f"{r.family:<12}{r.alpha:>7.4g}{r.n:>6}  {r.estimator:<20}"
                f"{r.bias:>11.4g}{r.sd:>11.4g}{r.mse:>11.4g}"
            )
        return lines
