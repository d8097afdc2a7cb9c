"""
Log-spectral estimators of the pole location and of the memory parameter.

For a band count k and weights f_p = f(p/k), the weighted symmetric log sum at
index q is

    S(q) = sum_{p=1}^k f_p (log g_{fold(q+p)} + log g_{fold(q-p)})

where g is a spectral estimate on 0..n//2. The pole search maximises the
normalised S over q with the smoothed, floored spectrum; the two-step estimate
re-evaluates it at the chosen index with a wider band. The log-periodogram
comparators use the raw periodogram and centred log weights.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from polefinder.errors import (
    BandwidthTooLarge,
    DegenerateBand,
    DomainError,
    SeriesTooShort,
)
from polefinder.estimation.bandwidth import (
    MIN_PIPELINE_LENGTH,
    EstimatorConfig,
    bandwidth_defaults,
    round_half_up,
)
from polefinder.spectral.periodogram import (
    PeriodogramGrid,
    SmoothedSpectrum,
    TimeSeries,
    averaged_periodogram,
    fold_index,
    fourier_frequency,
    periodogram,
)
from polefinder.spectral.weights import PSI_PAPER, W_PAPER, WeightSpec, band_weights

log = logging.getLogger(__name__)


class Regime(Enum):
    INTERIOR = "interior"
    AT_ZERO = "at_zero"
    AT_PI = "at_pi"


class Variant(Enum):
    TWO_STEP = "two_step"
    FIRST_STAGE = "first_stage"
    LOG_PERIODOGRAM = "log_periodogram"


@dataclass(frozen=True)
class AlphaProfile:
    """Memory estimates at every canonical index q = 0..n//2."""

    values: np.ndarray
    n: int
    k: int
    k1: int
    weight: str

    @property
    def lambdas(self) -> np.ndarray:
        return fourier_frequency(np.arange(self.values.size), self.n)


@dataclass(frozen=True)
class PoleEstimate:
    q_hat: int
    n: int
    profile: AlphaProfile
    boundary_regime: Regime

    @property
    def lambda_hat(self) -> float:
        return fourier_frequency(self.q_hat, self.n)


@dataclass(frozen=True)
class MemoryEstimate:
    """
    A memory-parameter estimate. ``span`` is the smoothing bandwidth (None for
    the log-periodogram, which uses raw ordinates). Values outside (0, 1) are
    kept as computed and flagged through ``out_of_range``.
    """

    alpha: float
    variant: Variant
    anchor_q: int
    band: int
    span: Optional[int] = None

    @property
    def out_of_range(self) -> bool:
        return not 0.0 < self.alpha < 1.0


def regime_for(q: int, n: int) -> Regime:
    if q == 0:
        return Regime.AT_ZERO
    if n % 2 == 0 and q == n // 2:
        return Regime.AT_PI
    return Regime.INTERIOR


def anchor_index(lambda0: float, n: int) -> int:
    """Index of the Fourier frequency closest to lambda0, folded onto 0..n//2."""
    return fold_index(round_half_up(n * lambda0 / (2.0 * np.pi)), n)


def _check_band(k: int, n: int):
    if k < 2:
        raise DomainError(f"The band count must be at least 2, got {k}.")
    if k > n // 2:
        raise BandwidthTooLarge(f"Band count {k} exceeds n/2 = {n // 2} for n = {n}.")


def _check_index(q: int, n: int):
    if not 0 <= q <= n // 2:
        raise DomainError(f"Index q = {q} is outside 0..{n // 2}.")


def _band_indices(q, k: int, n: int, remap_zero: bool = False):
    q = np.atleast_1d(np.asarray(q, dtype=np.int64))[:, None]
    p = np.arange(1, k + 1)[None, :]
    upper, lower = fold_index(q + p, n), fold_index(q - p, n)
    if remap_zero:
        upper = np.where(upper == 0, 1, upper)
        lower = np.where(lower == 0, 1, lower)
    return upper, lower


def _weighted_log_sum(log_values: np.ndarray, q, weights: np.ndarray, n: int, remap_zero=False):
    upper, lower = _band_indices(q, weights.size, n, remap_zero)
    return (log_values[upper] + log_values[lower]) @ weights


def alpha_hat_at(
    q: int, f_hat: SmoothedSpectrum, k: int, psi: WeightSpec = PSI_PAPER
) -> float:
    """
    Memory estimate at lambda_q from the floored smoothed spectrum:
    (2 h_bar k)^{-1} sum_p psi_p (log f_{q+p} + log f_{q-p}).
    """
    _check_band(k, f_hat.n)
    _check_index(q, f_hat.n)
    weights, h_bar = band_weights(psi, k)
    total = _weighted_log_sum(f_hat.log_floored, q, weights, f_hat.n)[0]
    return float(total / (2.0 * h_bar * k))


def alpha_profile(
    f_hat: SmoothedSpectrum, k: int, psi: WeightSpec = PSI_PAPER
) -> AlphaProfile:
    _check_band(k, f_hat.n)
    weights, h_bar = band_weights(psi, k)
    q = np.arange(f_hat.half + 1)
    values = _weighted_log_sum(f_hat.log_floored, q, weights, f_hat.n) / (2.0 * h_bar * k)
    values.setflags(write=False)
    return AlphaProfile(
        values=values, n=f_hat.n, k=k, k1=f_hat.bandwidth, weight=psi.id.value
    )


def _argmax_estimate(profile: AlphaProfile) -> PoleEstimate:
    # np.argmax returns the first maximiser, i.e. ties go to the smallest q.
    q_hat = int(np.argmax(profile.values))
    return PoleEstimate(
        q_hat=q_hat,
        n=profile.n,
        profile=profile,
        boundary_regime=regime_for(q_hat, profile.n),
    )


def pole_search(
    f_hat: SmoothedSpectrum, k: int, psi: WeightSpec = PSI_PAPER
) -> PoleEstimate:
    """
    Pole index q_hat = argmax_q alpha_hat(lambda_q) over q = 0..n//2, ties
    broken towards the smallest index.
    """
    return _argmax_estimate(alpha_profile(f_hat, k, psi))


def first_stage_alpha(pole: PoleEstimate) -> MemoryEstimate:
    """alpha_hat at the estimated pole; reported for comparison only."""
    return MemoryEstimate(
        alpha=float(pole.profile.values[pole.q_hat]),
        variant=Variant.FIRST_STAGE,
        anchor_q=pole.q_hat,
        band=pole.profile.k,
        span=pole.profile.k1,
    )


def two_step_alpha(
    q_check: int,
    grid: PeriodogramGrid,
    m: int,
    m1: int,
    w: WeightSpec = W_PAPER,
) -> MemoryEstimate:
    """
    Two-step memory estimate at a preliminary pole index ``q_check``.

    The periodogram is re-smoothed with span m1, floored at 1/n, and the
    symmetric weighted log sum with weight w over m bands is normalised by
    2 h_bar_w m.

    Raises
    ------
    BandwidthTooLarge
        If m + m1 > n // 2.
    """
    n = grid.n
    if m < 2 or m1 < 1:
        raise DomainError(f"Two-step bandwidths need m >= 2 and m1 >= 1, got {m}, {m1}.")
    if m + m1 > n // 2:
        raise BandwidthTooLarge(f"m + m1 = {m + m1} exceeds n/2 = {n // 2} for n = {n}.")
    return two_step_from_spectrum(q_check, averaged_periodogram(grid, m1), m, w)


def two_step_from_spectrum(
    q_check: int, f_hat: SmoothedSpectrum, m: int, w: WeightSpec = W_PAPER
) -> MemoryEstimate:
    """Second step of ``two_step_alpha`` on an already smoothed spectrum."""
    _check_band(m, f_hat.n)
    _check_index(q_check, f_hat.n)
    weights, h_bar = band_weights(w, m)
    total = _weighted_log_sum(f_hat.log_floored, q_check, weights, f_hat.n)[0]
    alpha = float(total / (2.0 * h_bar * m))
    if not 0.0 < alpha < 1.0:
        log.warning("Two-step estimate %s at q = %s is outside (0, 1)", alpha, q_check)
    return MemoryEstimate(
        alpha=alpha,
        variant=Variant.TWO_STEP,
        anchor_q=int(q_check),
        band=m,
        span=f_hat.bandwidth,
    )


def centered_log_weights(k: int) -> np.ndarray:
    """phi_j = log j - k^{-1} sum_l log l, j = 1..k."""
    logs = np.log(np.arange(1, k + 1))
    return logs - logs.mean()


def _log_ordinates(grid: PeriodogramGrid) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(grid.ordinates)


def log_periodogram_alpha(q: int, grid: PeriodogramGrid, k: int) -> MemoryEstimate:
    """
    Log-periodogram memory estimate at lambda_q,

        -(2 sum_j phi_j log j)^{-1} sum_j phi_j (log I_{q+j} + log I_{q-j}),

    with band indices folded and a folded index 0 read as index 1.

    Raises
    ------
    DegenerateBand
        If the band contains zero ordinates, whose logarithm is undefined.
    """
    _check_band(k, grid.n)
    _check_index(q, grid.n)
    upper, lower = _band_indices(q, k, grid.n, remap_zero=True)
    band = np.concatenate([grid.ordinates[upper[0]], grid.ordinates[lower[0]]])
    if np.all(band == 0.0):
        raise DegenerateBand(f"All periodogram ordinates in the band around q = {q} are zero.")
    if np.any(band == 0.0):
        raise DegenerateBand(
            f"The band around q = {q} contains zero periodogram ordinates; "
            "their logarithm is undefined."
        )
    phi = centered_log_weights(k)
    total = _weighted_log_sum(_log_ordinates(grid), q, phi, grid.n, remap_zero=True)[0]
    alpha = float(-total / (2.0 * np.sum(phi * np.log(np.arange(1, k + 1)))))
    return MemoryEstimate(alpha=alpha, variant=Variant.LOG_PERIODOGRAM, anchor_q=int(q), band=k)


def log_periodogram_profile(grid: PeriodogramGrid, k: int) -> AlphaProfile:
    _check_band(k, grid.n)
    if grid.is_degenerate:
        raise DegenerateBand("The periodogram has no power at nonzero frequencies.")
    phi = centered_log_weights(k)
    denominator = 2.0 * np.sum(phi * np.log(np.arange(1, k + 1)))
    q = np.arange(grid.half + 1)
    with np.errstate(invalid="ignore"):
        values = -_weighted_log_sum(_log_ordinates(grid), q, phi, grid.n, remap_zero=True)
        values = values / denominator
    bad = ~np.isfinite(values)
    if np.any(bad):
        log.warning(
            "%s log-periodogram profile value(s) undefined because of zero ordinates",
            int(bad.sum()),
        )
        values = np.where(bad, -np.inf, values)
    values.setflags(write=False)
    return AlphaProfile(values=values, n=grid.n, k=k, k1=0, weight="log")


def log_periodogram_pole(grid: PeriodogramGrid, k: int) -> PoleEstimate:
    """q_tilde = argmax_q of the log-periodogram profile, smallest index on ties."""
    return _argmax_estimate(log_periodogram_profile(grid, k))


@dataclass(frozen=True)
class PipelineResult:
    """
    Outcome of ``estimate_pipeline``. ``pole`` is None when the pole location
    was supplied instead of searched for.
    """

    pole: Optional[PoleEstimate]
    memory: MemoryEstimate
    config: EstimatorConfig
    grid: PeriodogramGrid

    @property
    def anchor_q(self) -> int:
        return self.memory.anchor_q

    @property
    def regime(self) -> Regime:
        return regime_for(self.anchor_q, self.grid.n)


def estimate_pipeline(
    x: Union[TimeSeries, np.ndarray, list],
    cfg: Optional[EstimatorConfig] = None,
    known_pole: Optional[float] = None,
) -> PipelineResult:
    """
    Periodogram, smoothing with k1, pole search with (k, psi), then the two-step
    memory estimate at the found index with (m, m1, w).

    When ``known_pole`` (radians) is given, the search is skipped and the
    two-step estimate is anchored at the closest Fourier frequency.

    Raises
    ------
    SeriesTooShort
        If the series has fewer than 64 observations.
    DegenerateBand
        If the periodogram carries no power (e.g. a constant series).
    """
    series = x if isinstance(x, TimeSeries) else TimeSeries(x)
    n = series.n
    if n < MIN_PIPELINE_LENGTH:
        raise SeriesTooShort(
            f"At least {MIN_PIPELINE_LENGTH} observations are needed, got n = {n}."
        )
    cfg = (cfg or bandwidth_defaults(n)).validate(n)
    grid = periodogram(series)
    if grid.is_degenerate:
        raise DegenerateBand(
            "The periodogram has no power at nonzero frequencies; "
            "is the series constant?"
        )

    if known_pole is None:
        f_hat = averaged_periodogram(grid, cfg.k1)
        pole = pole_search(f_hat, cfg.k, cfg.psi)
        anchor = pole.q_hat
    else:
        pole = None
        anchor = anchor_index(known_pole, n)
    memory = two_step_alpha(anchor, grid, cfg.m, cfg.m1, cfg.w)
    log.debug("Pipeline on n = %s: anchor q = %s, alpha = %s", n, anchor, memory.alpha)
    return PipelineResult(pole=pole, memory=memory, config=cfg, grid=grid)
