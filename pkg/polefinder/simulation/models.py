"""
The simulation models and their dispatch onto the circulant simulator.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from polefinder.errors import DomainError
from polefinder.estimation.bandwidth import round_half_up
from polefinder.simulation.autocorrelation import (
    AutocovSeq,
    autocorr_farima,
    autocorr_gegenbauer_halfpi,
    spectral_flip,
)
from polefinder.simulation.davies_harte import (
    EmbeddingSpectrum,
    embedding_spectrum,
    replication_rng,
    synthesize,
)
from polefinder.spectral.periodogram import TimeSeries

MAX_SEED = 2**64 - 1


class SimFamily(Enum):
    FARIMA_ZERO_POLE = "farima"
    GEGENBAUER_HALF_PI = "gegenbauer"
    FLIPPED_PI = "flipped-pi"

    @property
    def pole(self) -> float:
        """Pole frequency in radians."""
        return _POLES[self]

    @classmethod
    def parse(cls, value: str) -> "SimFamily":
        for family in cls:
            if value in (family.value, family.name):
                return family
        raise DomainError(
            f"Unknown model {value!r}; choose one of {[f.value for f in cls]}."
        )


_POLES = {
    SimFamily.FARIMA_ZERO_POLE: 0.0,
    SimFamily.GEGENBAUER_HALF_PI: math.pi / 2.0,
    SimFamily.FLIPPED_PI: math.pi,
}


def true_pole_index(family: SimFamily, n: int) -> int:
    """s = round(n lambda0 / 2 pi), the pole in Fourier-index units."""
    return round_half_up(n * family.pole / (2.0 * math.pi))


@dataclass(frozen=True)
class SimModel:
    family: SimFamily
    alpha: float
    n: int
    seed: int
    replication: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(
                f"The memory parameter alpha must lie in (0, 1), got {self.alpha}."
            )
        if self.n < 2:
            raise DomainError(f"The series length must be at least 2, got {self.n}.")
        if not 0 <= self.seed <= MAX_SEED:
            raise DomainError("The seed must be a nonnegative 64-bit integer.")


def model_autocorrelation(family: SimFamily, alpha: float, maxlag: int) -> AutocovSeq:
    if family is SimFamily.FARIMA_ZERO_POLE:
        return autocorr_farima(alpha, maxlag)
    if family is SimFamily.GEGENBAUER_HALF_PI:
        return autocorr_gegenbauer_halfpi(alpha, maxlag)
    return spectral_flip(autocorr_farima(alpha, maxlag))


@lru_cache(maxsize=64)
def model_spectrum(family: SimFamily, alpha: float, n: int) -> EmbeddingSpectrum:
    """Circulant eigenvalues for a model, shared by all its replications."""
    return embedding_spectrum(model_autocorrelation(family, alpha, n), n)


def simulate(model: SimModel) -> TimeSeries:
    """
    One series from ``model``; identical for identical (family, alpha, n, seed,
    replication).
    """
    spectrum = model_spectrum(model.family, model.alpha, model.n)
    return TimeSeries(synthesize(spectrum, replication_rng(model.seed, model.replication)))
