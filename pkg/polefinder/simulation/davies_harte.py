"""
Exact simulation of stationary Gaussian series by circulant embedding.

The Toeplitz covariance of (x_1..x_n) is embedded in a circulant of size 2n
with first row (rho_0, .., rho_{n-1}, rho_n, rho_{n-1}, .., rho_1). When its
eigenvalues are nonnegative, a complex Gaussian vector scaled by their square
roots and transformed back has exactly the target covariance on its first n
coordinates.

Random numbers come from a Philox counter-based generator keyed by
(seed, replication), and normal deviates are obtained by inverse-CDF from
uniforms, so every replication has a fixed stream layout regardless of how
replications are scheduled.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import special

from polefinder.errors import DomainError, NotEmbeddable
from polefinder.simulation.autocorrelation import AutocovSeq
from polefinder.spectral.periodogram import TimeSeries

log = logging.getLogger(__name__)

NEGATIVE_EIGEN_RTOL = 1e-10
IMAG_RTOL = 1e-9

# Shifts rng.random() output from [0, 1) into the open interval (0, 1).
_HALF_ULP = 2.0**-54


@dataclass(frozen=True)
class EmbeddingSpectrum:
    """Eigenvalues of the 2n circulant embedding, negatives already clipped."""

    eigenvalues: np.ndarray
    min_eigenvalue: float
    n: int


def replication_rng(seed: int, replication: int = 0) -> np.random.Generator:
    """Philox generator for one replication of a seeded experiment."""
    if seed < 0 or replication < 0:
        raise DomainError("Seeds and replication indices must be nonnegative.")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replication),))
    return np.random.Generator(np.random.Philox(sequence))


def embedding_spectrum(acs: AutocovSeq, n: int) -> EmbeddingSpectrum:
    """
    Eigenvalues of the circulant embedding of rho_0..rho_n.

    Raises
    ------
    NotEmbeddable
        If an eigenvalue is below -1e-10 times the largest one.
    """
    if n < 1:
        raise DomainError(f"The series length must be positive, got {n}.")
    if acs.maxlag < n:
        raise DomainError(f"Embedding a length-{n} series needs rho up to lag {n}.")
    rho = acs.rho
    row = np.concatenate([rho[: n + 1], rho[n - 1 : 0 : -1]])
    transform = np.fft.fft(row)
    largest = float(np.max(np.abs(transform.real)))
    if np.max(np.abs(transform.imag)) > IMAG_RTOL * largest:
        raise NotEmbeddable("The circulant embedding has complex eigenvalues.")
    eigenvalues = transform.real
    smallest = float(eigenvalues.min())
    if smallest < -NEGATIVE_EIGEN_RTOL * largest:
        raise NotEmbeddable(
            f"The autocovariance cannot be embedded at length {n}: the smallest "
            f"circulant eigenvalue is {smallest:.3g}."
        )
    if smallest < 0.0:
        log.warning("Clipping circulant eigenvalues down to %s to zero", smallest)
        eigenvalues = np.maximum(eigenvalues, 0.0)
    eigenvalues.setflags(write=False)
    return EmbeddingSpectrum(eigenvalues=eigenvalues, min_eigenvalue=smallest, n=n)


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    return special.ndtri(rng.random(size) + _HALF_ULP)


def synthesize(spectrum: EmbeddingSpectrum, rng: np.random.Generator) -> np.ndarray:
    """One draw of the first n coordinates of the embedded Gaussian vector."""
    n = spectrum.n
    size = 2 * n
    z = standard_normals(rng, size)
    coefficients = np.empty(size, dtype=complex)
    coefficients[0] = z[0]
    coefficients[n] = z[1]
    coefficients[1:n] = (z[2 : n + 1] + 1j * z[n + 1 :]) / np.sqrt(2.0)
    coefficients[n + 1 :] = np.conj(coefficients[1:n][::-1])
    values = np.fft.ifft(np.sqrt(spectrum.eigenvalues) * coefficients)
    return np.sqrt(size) * values.real[:n]


def davies_harte(acs: AutocovSeq, n: int, seed: int, replication: int = 0) -> TimeSeries:
    """
    Gaussian series of length n with autocovariance rho (unit variance).

    Deterministic in (acs, n, seed, replication).
    """
    spectrum = embedding_spectrum(acs, n)
    return TimeSeries(synthesize(spectrum, replication_rng(seed, replication)))
