"""
Periodogram and averaged-periodogram estimates on the Fourier grid.

All grids run over the canonical indices 0..n//2. Indices outside that range are
mapped back with ``fold_index``, which uses the periodicity and the even
symmetry of the spectrum of a real series.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from polefinder.errors import BandwidthTooLarge, DomainError, NonFiniteInput

log = logging.getLogger(__name__)

# Relative power below which a periodogram carries no usable information.
DEGENERATE_RTOL = 1e-12

IntOrArray = Union[int, np.ndarray]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """A finite, real-valued observation sequence x_1..x_n."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DomainError(
                "A time series must be a non-empty one-dimensional sequence, "
                "got shape %s." % (values.shape,)
            )
        if not np.all(np.isfinite(values)):
            bad = int(np.count_nonzero(~np.isfinite(values)))
            raise NonFiniteInput(
                f"The series contains {bad} non-finite value(s) (NaN or Inf). "
                "Remove or impute them before estimation."
            )
        object.__setattr__(self, "values", _frozen(values))

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class PeriodogramGrid:
    """
    Periodogram ordinates I_0..I_{n//2} of a length-n series.

    ``mean_square`` is n^{-1} sum x_t^2 of the source series; it scales the
    degeneracy test and is 0 for synthetic grids built from ordinates.
    """

    ordinates: np.ndarray
    n: int
    mean_square: float = 0.0

    def __post_init__(self):
        ordinates = np.asarray(self.ordinates, dtype=float)
        if ordinates.shape != (self.n // 2 + 1,):
            raise DomainError(
                f"A grid for n = {self.n} needs {self.n // 2 + 1} ordinates, "
                f"got {ordinates.size}."
            )
        if ordinates[0] != 0.0:
            raise DomainError("The zero-frequency ordinate I_0 must be exactly 0.")
        if np.any(ordinates < 0) or not np.all(np.isfinite(ordinates)):
            raise DomainError("Periodogram ordinates must be finite and nonnegative.")
        object.__setattr__(self, "ordinates", _frozen(ordinates))

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def is_degenerate(self) -> bool:
        """True when no nonzero frequency carries power (e.g. a constant series)."""
        peak = float(self.ordinates[1:].max()) if self.half >= 1 else 0.0
        return peak <= DEGENERATE_RTOL * self.mean_square


@dataclass(frozen=True)
class SmoothedSpectrum:
    """Averaged periodogram ``raw`` and its floored version max(raw, 1/n)."""

    raw: np.ndarray
    floored: np.ndarray
    bandwidth: int
    n: int

    def __post_init__(self):
        object.__setattr__(self, "raw", _frozen(self.raw))
        object.__setattr__(self, "floored", _frozen(self.floored))

    @classmethod
    def from_values(cls, values, n: int) -> "SmoothedSpectrum":
        """
        Wrap a spectrum given directly on 0..n//2 (no smoothing), applying the
        floor. Used for synthetic spectra and for plugging in external estimates.
        """
        raw = np.asarray(values, dtype=float)
        if raw.shape != (n // 2 + 1,):
            raise DomainError(
                f"A spectrum for n = {n} needs {n // 2 + 1} values, got {raw.size}."
            )
        return cls(raw=raw, floored=np.maximum(raw, 1.0 / n), bandwidth=0, n=n)

    @property
    def half(self) -> int:
        return self.n // 2

    @cached_property
    def log_floored(self) -> np.ndarray:
        return np.log(self.floored)


def fourier_frequency(ell: IntOrArray, n: int):
    """lambda_ell = 2 pi ell / n, in radians."""
    if np.ndim(ell):
        return 2.0 * np.pi * np.asarray(ell, dtype=float) / n
    return 2.0 * np.pi * ell / n


def fold_index(ell: IntOrArray, n: int) -> IntOrArray:
    """
    Map any integer frequency index onto 0..n//2.

    The index is reduced modulo n and indices above n//2 are reflected to
    n - ell, so that I_{fold(ell)} = I_ell for the periodogram of a real series.
    """
    if np.ndim(ell):
        reduced = np.mod(np.asarray(ell, dtype=np.int64), n)
        return np.where(reduced > n // 2, n - reduced, reduced)
    reduced = int(ell) % n
    return n - reduced if reduced > n // 2 else reduced


def periodogram(x: Union[TimeSeries, np.ndarray, list]) -> PeriodogramGrid:
    """
    Periodogram I_ell = |(2 pi n)^{-1/2} sum_t x_t e^{i t lambda_ell}|^2 for
    ell = 1..n//2, with I_0 = 0.

    The sample mean is removed before the transform; at nonzero Fourier
    frequencies this changes nothing, and pinning I_0 to zero is the mean
    correction itself.

    Parameters
    ----------
    x : TimeSeries or array_like
        The observed series. Non-finite values raise ``NonFiniteInput``.

    Returns
    -------
    PeriodogramGrid
    """
    series = x if isinstance(x, TimeSeries) else TimeSeries(x)
    values = series.values
    n = series.n
    # Only |.|^2 is used, so the e^{-i} sign of the FFT is immaterial.
    transform = np.fft.rfft(values - values.mean())
    ordinates = (transform.real**2 + transform.imag**2) / (2.0 * np.pi * n)
    ordinates = ordinates[: n // 2 + 1]
    ordinates[0] = 0.0
    return PeriodogramGrid(
        ordinates=ordinates, n=n, mean_square=float(np.mean(values**2))
    )


def averaged_periodogram(grid: PeriodogramGrid, k1: int) -> SmoothedSpectrum:
    """
    Average 2*k1 + 1 neighbouring ordinates around every canonical index and
    floor the result at 1/n.

    Neighbours beyond 0 or n//2 are folded back, so the pinned I_0 = 0 enters
    the averages next to the origin.

    Raises
    ------
    BandwidthTooLarge
        If k1 is negative or exceeds n//4.
    """
    n = grid.n
    if k1 < 0 or k1 > n // 4:
        raise BandwidthTooLarge(
            f"Smoothing bandwidth k1 = {k1} must lie in 0..{n // 4} for n = {n}."
        )
    if k1 == 0:
        raw = np.array(grid.ordinates)
    else:
        offsets = np.arange(-k1, k1 + 1)
        index = fold_index(np.arange(grid.half + 1)[:, None] + offsets[None, :], n)
        raw = grid.ordinates[index].sum(axis=1) / (2 * k1 + 1)
    return SmoothedSpectrum(
        raw=raw, floored=np.maximum(raw, 1.0 / n), bandwidth=int(k1), n=n
    )
