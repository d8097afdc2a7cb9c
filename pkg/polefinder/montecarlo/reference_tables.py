"""
Published Monte Carlo reference values (2500 replications) and the tolerance
rules used to compare a report against them.

Pole rows hold (bias, sd) of the estimated index in Fourier-index units;
memory rows hold (bias, sd, mse).
"""
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Tuple

import pandas as pd

from polefinder.montecarlo.report import MCReport

ALPHAS = (0.2, 0.4, 0.6, 0.8)
REFERENCE_REPS = 2500

POLE_SD_RTOL = {"POLE_PSI": 0.25, "POLE_LOG": 0.30}
MEMORY_BIAS_TOL = 0.01
MEMORY_SD_RTOL = 0.25

_POLE_ROWS = {
    ("farima", 256): {
        "POLE_PSI": [(9.35, 8.33), (6.38, 6.96), (4.24, 5.39), (2.80, 4.04)],
        "POLE_LOG": [(9.26, 7.88), (7.32, 6.85), (5.94, 6.01), (4.85, 5.25)],
    },
    ("farima", 1024): {
        "POLE_PSI": [(15.40, 15.50), (8.43, 10.74), (4.81, 7.64), (2.62, 5.76)],
        "POLE_LOG": [(22.91, 25.31), (15.55, 20.89), (9.60, 14.02), (6.73, 9.96)],
    },
    ("gegenbauer", 256): {
        "POLE_PSI": [(0.003, 7.64), (-0.084, 5.33), (-0.091, 2.96), (-0.054, 1.56)],
        "POLE_LOG": [(0.209, 9.59), (0.270, 9.21), (0.272, 8.66), (0.320, 7.28)],
    },
    ("gegenbauer", 1024): {
        "POLE_PSI": [(0.051, 11.87), (0.117, 4.77), (0.063, 1.89), (0.216, 1.13)],
        "POLE_LOG": [(0.435, 27.89), (0.144, 25.77), (-0.213, 21.30), (-0.060, 13.52)],
    },
}

_MEMORY_ROWS = {
    ("farima", 256): {
        "TWO_STEP_AT_TRUE": [(-0.020, 0.064, 0.004), (-0.022, 0.067, 0.005), (-0.017, 0.071, 0.005), (-0.006, 0.072, 0.005)],
        "TWO_STEP_AT_HAT": [(-0.019, 0.057, 0.004), (-0.030, 0.065, 0.005), (-0.024, 0.074, 0.006), (-0.006, 0.075, 0.006)],
        "LOG_AT_TRUE": [(-0.001, 0.089, 0.008), (-0.003, 0.089, 0.008), (-0.003, 0.089, 0.008), (-0.007, 0.082, 0.007)],
        "LOG_AT_TILDE": [(-0.015, 0.084, 0.007), (-0.043, 0.090, 0.010), (-0.064, 0.099, 0.014), (-0.079, 0.105, 0.017)],
    },
    ("farima", 1024): {
        "TWO_STEP_AT_TRUE": [(-0.006, 0.024, 0.001), (-0.003, 0.025, 0.001), (0.007, 0.031, 0.001), (0.026, 0.031, 0.002)],
        "TWO_STEP_AT_HAT": [(-0.015, 0.030, 0.001), (-0.014, 0.035, 0.001), (0.002, 0.040, 0.002), (0.032, 0.045, 0.003)],
        "LOG_AT_TRUE": [(-0.002, 0.042, 0.002), (-0.003, 0.042, 0.002), (-0.005, 0.042, 0.002), (-0.005, 0.042, 0.002)],
        "LOG_AT_TILDE": [(-0.022, 0.045, 0.003), (-0.039, 0.054, 0.004), (-0.046, 0.059, 0.006), (-0.051, 0.066, 0.007)],
    },
    ("gegenbauer", 256): {
        "TWO_STEP_AT_TRUE": [(-0.020, 0.055, 0.003), (-0.035, 0.059, 0.005), (-0.041, 0.064, 0.006), (-0.040, 0.070, 0.006)],
        "TWO_STEP_AT_HAT": [(-0.010, 0.046, 0.002), (-0.020, 0.053, 0.003), (-0.004, 0.062, 0.004), (0.043, 0.059, 0.005)],
        "LOG_AT_TRUE": [(0.002, 0.094, 0.009), (0.000, 0.094, 0.009), (0.000, 0.093, 0.009), (0.005, 0.084, 0.007)],
        "LOG_AT_TILDE": [(-0.050, 0.098, 0.012), (-0.083, 0.121, 0.022), (-0.100, 0.156, 0.034), (-0.083, 0.182, 0.040)],
    },
    ("gegenbauer", 1024): {
        "TWO_STEP_AT_TRUE": [(-0.012, 0.022, 0.001), (-0.015, 0.024, 0.001), (-0.007, 0.028, 0.001), (0.014, 0.034, 0.001)],
        "TWO_STEP_AT_HAT": [(-0.014, 0.018, 0.001), (-0.017, 0.020, 0.001), (0.003, 0.024, 0.001), (0.044, 0.035, 0.003)],
        "LOG_AT_TRUE": [(-0.002, 0.038, 0.001), (-0.004, 0.038, 0.001), (-0.006, 0.038, 0.001), (-0.007, 0.038, 0.001)],
        "LOG_AT_TILDE": [(-0.039, 0.046, 0.004), (-0.064, 0.069, 0.009), (-0.061, 0.096, 0.013), (-0.023, 0.097, 0.010)],
    },
}


def reference_value(family: str, n: int, alpha: float, estimator: str) -> Tuple[float, ...]:
    """Published (bias, sd[, mse]) for a cell, or a KeyError if none exists."""
    rows = _POLE_ROWS if estimator in POLE_SD_RTOL else _MEMORY_ROWS
    return rows[(family, n)][estimator][ALPHAS.index(round(alpha, 6))]


@dataclass(frozen=True)
class Comparison:
    family: str
    alpha: float
    n: int
    estimator: str
    bias: float
    reference_bias: float
    bias_tolerance: float
    sd: float
    reference_sd: float
    sd_rtol: float

    @property
    def bias_ok(self) -> bool:
        return abs(self.bias - self.reference_bias) <= self.bias_tolerance

    @property
    def sd_ok(self) -> bool:
        return abs(self.sd - self.reference_sd) <= self.sd_rtol * self.reference_sd

    @property
    def passed(self) -> bool:
        return self.bias_ok and self.sd_ok


def compare_to_reference(report: MCReport) -> List[Comparison]:
    """
    Compare every record that has a published counterpart.

    Pole bias must be within max(1, 3 sd / sqrt(reps)) index units and pole sd
    within 25 % (psi search) or 30 % (log-periodogram search); memory bias must
    be within 0.01 and memory sd within 25 %.
    """
    comparisons = []
    for r in report.records:
        try:
            reference = reference_value(r.family, r.n, r.alpha, r.estimator)
        except (KeyError, ValueError):
            continue
        ref_bias, ref_sd = reference[0], reference[1]
        if r.estimator in POLE_SD_RTOL:
            bias_tol = max(1.0, 3.0 * ref_sd / math.sqrt(r.reps))
            sd_rtol = POLE_SD_RTOL[r.estimator]
        else:
            bias_tol = MEMORY_BIAS_TOL
            sd_rtol = MEMORY_SD_RTOL
        comparisons.append(
            Comparison(
                family=r.family,
                alpha=r.alpha,
                n=r.n,
                estimator=r.estimator,
                bias=r.bias,
                reference_bias=ref_bias,
                bias_tolerance=bias_tol,
                sd=r.sd,
                reference_sd=ref_sd,
                sd_rtol=sd_rtol,
            )
        )
    return comparisons


def comparison_frame(comparisons: List[Comparison]) -> pd.DataFrame:
    rows = [dict(asdict(c), bias_ok=c.bias_ok, sd_ok=c.sd_ok, passed=c.passed) for c in comparisons]
    return pd.DataFrame(rows)
