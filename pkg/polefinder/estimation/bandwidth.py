"""
Bandwidths for the pole search and the two-step estimate, and the
configuration object that carries them.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from polefinder.errors import BandwidthTooLarge, ConfigError, SeriesTooShort
from polefinder.spectral.weights import PSI_PAPER, W_PAPER, WeightSpec

log = logging.getLogger(__name__)

MIN_PIPELINE_LENGTH = 64

# Published pole-search band counts: k = 14 at n = 256 and k = 24 at n = 1024.
_K_ANCHORS = ((256, 14), (1024, 24))

M_RULES = ("quarter", "power")

# Smallest band count the defaults will hand out.
MIN_DEFAULT_BAND = 8


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def smoothing_bandwidth(band: int) -> int:
    """round(band^0.6 * log log(2 band)), at least 1."""
    return max(1, round_half_up(band**0.6 * math.log(math.log(2.0 * band))))


def pole_band_count(n: int) -> int:
    """
    k = 14 up to n = 256, 24 from n = 1024, linear in log n in between.
    """
    (n_lo, k_lo), (n_hi, k_hi) = _K_ANCHORS
    if n <= n_lo:
        return k_lo
    if n >= n_hi:
        return k_hi
    slope = (k_hi - k_lo) / (math.log(n_hi) - math.log(n_lo))
    return round_half_up(k_lo + slope * (math.log(n) - math.log(n_lo)))


@dataclass(frozen=True)
class EstimatorConfig:
    """
    Band counts and smoothing spans of the estimators.

    k, k1 drive the pole search with weight ``psi``; m, m1 drive the two-step
    memory estimate with weight ``w``.
    """

    k: int
    k1: int
    m: int
    m1: int
    psi: WeightSpec = field(default=PSI_PAPER, compare=False)
    w: WeightSpec = field(default=W_PAPER, compare=False)

    def validate(self, n: int) -> "EstimatorConfig":
        half = n // 2
        if self.k < 2 or self.m < 2:
            raise ConfigError(
                f"Band counts must be at least 2, got k = {self.k}, m = {self.m}."
            )
        if self.k1 < 1 or self.m1 < 1:
            raise ConfigError(
                f"Smoothing spans must be at least 1, got k1 = {self.k1}, m1 = {self.m1}."
            )
        for band, span, label in ((self.k, self.k1, "k + k1"), (self.m, self.m1, "m + m1")):
            if band + span > half:
                raise BandwidthTooLarge(
                    f"{label} = {band + span} exceeds n/2 = {half} for n = {n}."
                )
            if span > n // 4:
                raise BandwidthTooLarge(
                    f"Smoothing span {span} exceeds n/4 = {n // 4} for n = {n}."
                )
        return self

    def with_overrides(
        self,
        k: Optional[int] = None,
        k1: Optional[int] = None,
        m: Optional[int] = None,
        m1: Optional[int] = None,
    ) -> "EstimatorConfig":
        changes = {
            name: value
            for name, value in (("k", k), ("k1", k1), ("m", m), ("m1", m1))
            if value is not None
        }
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "k1": self.k1,
            "m": self.m,
            "m1": self.m1,
            "psi": self.psi.id.value,
            "w": self.w.id.value,
        }


def bandwidth_defaults(
    n: int,
    m_rule: str = "quarter",
    m_scale: float = 1.0,
    psi: WeightSpec = PSI_PAPER,
    w: WeightSpec = W_PAPER,
) -> EstimatorConfig:
    """
    Default bandwidths for a series of length n.

    Parameters
    ----------
    n : int
        Series length, at least 64.
    m_rule : {"quarter", "power"}
        "quarter" takes m = n // 4 (the Monte Carlo design); "power" takes
        m = m_scale * n^{4/5}, the rate of the asymptotic theory.
    m_scale : float
        Constant of the "power" rule.

    Raises
    ------
    SeriesTooShort
        If n < 64.
    """
    if n < MIN_PIPELINE_LENGTH:
        raise SeriesTooShort(
            f"At least {MIN_PIPELINE_LENGTH} observations are needed, got n = {n}."
        )
    if m_rule not in M_RULES:
        raise ConfigError(f"Unknown m rule {m_rule!r}; choose one of {M_RULES}.")

    half = n // 2
    k = pole_band_count(n)
    k1 = smoothing_bandwidth(k)
    k = max(MIN_DEFAULT_BAND, min(k, half - k1))

    if m_rule == "quarter":
        m = n // 4
    else:
        m = max(MIN_DEFAULT_BAND, round_half_up(m_scale * n**0.8))
    m1 = min(smoothing_bandwidth(m), n // 4)
    if m + m1 > half:
        m = max(MIN_DEFAULT_BAND, half - m1)
        log.warning("m reduced to %s so that m + m1 fits in n/2 = %s", m, half)

    return EstimatorConfig(k=k, k1=k1, m=m, m1=m1, psi=psi, w=w)
