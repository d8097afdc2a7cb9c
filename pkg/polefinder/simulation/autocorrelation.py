"""
Autocorrelations of the long-memory test models, by forward recursion.

With d = alpha / 2, the fractionally integrated model (1 - L)^d x_t = e_t has

    rho_j = (j - 1 + d) / (j - d) rho_{j-1},

and the cyclical model (1 + L^2)^d x_t = e_t, whose pole sits at pi / 2, has

    rho_{2j} = (1 - j - d) / (j - d) rho_{2(j-1)},   rho_{2j-1} = 0.
"""
from dataclasses import dataclass

import numpy as np

from polefinder.errors import DomainError


@dataclass(frozen=True)
class AutocovSeq:
    """Autocorrelations rho_0..rho_maxlag of a process scaled to unit variance."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.ndim != 1 or rho.size == 0:
            raise DomainError("An autocorrelation sequence needs at least rho_0.")
        if rho[0] != 1.0:
            raise DomainError(f"rho_0 must be 1, got {rho[0]}.")
        if np.any(np.abs(rho) > 1.0 + 1e-12):
            raise DomainError("Autocorrelations must lie in [-1, 1].")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def maxlag(self) -> int:
        return self.rho.size - 1


def _check_alpha(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"The memory parameter must lie in (0, 1), got {alpha}.")


def _check_maxlag(maxlag: int):
    if maxlag < 0:
        raise DomainError(f"maxlag must be nonnegative, got {maxlag}.")


def _farima_ratios(d: float, count: int) -> np.ndarray:
    j = np.arange(1, count + 1, dtype=float)
    return np.cumprod((j - 1.0 + d) / (j - d))


def autocorr_farima(alpha: float, maxlag: int) -> AutocovSeq:
    """Autocorrelations of (1 - L)^{alpha/2} x_t = e_t up to lag maxlag."""
    _check_alpha(alpha)
    _check_maxlag(maxlag)
    rho = np.ones(maxlag + 1)
    rho[1:] = _farima_ratios(alpha / 2.0, maxlag)
    return AutocovSeq(rho)


def autocorr_gegenbauer_halfpi(alpha: float, maxlag: int) -> AutocovSeq:
    """Autocorrelations of (1 + L^2)^{alpha/2} x_t = e_t up to lag maxlag."""
    _check_alpha(alpha)
    _check_maxlag(maxlag)
    d = alpha / 2.0
    rho = np.zeros(maxlag + 1)
    rho[0] = 1.0
    half = maxlag // 2
    if half:
        j = np.arange(1, half + 1, dtype=float)
        rho[2 : 2 * half + 1 : 2] = np.cumprod((1.0 - j - d) / (j - d))
    return AutocovSeq(rho)


def spectral_flip(acs: AutocovSeq) -> AutocovSeq:
    """
    Autocorrelations of (-1)^t x_t: rho_j -> (-1)^j rho_j, which moves a pole
    at frequency 0 to pi.
    """
    signs = np.where(np.arange(acs.rho.size) % 2 == 0, 1.0, -1.0)
    return AutocovSeq(signs * acs.rho)
