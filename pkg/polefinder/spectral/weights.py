"""
Weight functions on (0, 1) used by the log-spectral estimators.

Two analytic weights ship with the package: ``psi`` for the pole search and
``w`` for the two-step memory estimate. Both integrate to zero over (0, 1).
Tabulated weights are interpolated with a cubic spline.

The integral constants consumed by the estimators and the confidence
intervals are obtained by adaptive quadrature, never hard-coded, so tabulated
weights are handled the same way as the analytic ones.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate, interpolate

from polefinder.errors import DomainError, QuadratureFailure, WeightNotCentered

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
CENTERING_TOL = 1e-8


class WeightId(Enum):
    PSI_PAPER = "psi"
    W_PAPER = "w"
    USER_TABULATED = "tabulated"


@dataclass(frozen=True)
class WeightConstants:
    """
    Integral constants of a weight function f on (0, 1).

    h          -int f(u) log u du
    varsigma   int f'(u)^2 du (None when f' is not square integrable)
    psi_bar_dd int f''(u) log u du (None when it does not exist)
    phi_sq     int f(u)^2 du / 2
    u2_moment  int u^2 f(u) du
    """

    h: float
    varsigma: Optional[float]
    psi_bar_dd: Optional[float]
    phi_sq: float
    u2_moment: float


def _unit_interval(u, name: str) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"The weight {name}(u) is only defined for u in [0, 1].")
    return arr


def _scalar_or_array(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def _u_cubed_log(u: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(u > 0.0, u**3 * np.log(u), 0.0)


def _u_log(u: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(u > 0.0, u * np.log(u), 0.0)


def psi(u):
    """
    Pole-search weight -u^2 + 35 u^{5/2}/6 - 29 u^3/6 + 2 u^3 log u.

    Vanishes at both ends of [0, 1]; raises ``DomainError`` outside it.
    """
    u = _unit_interval(u, "psi")
    value = -(u**2) + 35.0 * u**2.5 / 6.0 - 29.0 * u**3 / 6.0 + 2.0 * _u_cubed_log(u)
    return _scalar_or_array(value)


def psi_prime(u):
    u = _unit_interval(u, "psi'")
    value = (
        -2.0 * u + 175.0 * u**1.5 / 12.0 - 12.5 * u**2 + 6.0 * u * _u_log(u)
    )
    return _scalar_or_array(value)


def psi_second(u):
    u = _unit_interval(u, "psi''")
    value = -2.0 + 175.0 * np.sqrt(u) / 8.0 - 19.0 * u + 12.0 * _u_log(u)
    return _scalar_or_array(value)


def w(u):
    """Two-step weight u^{1/3} - 9 u^{1/2} / 8."""
    u = _unit_interval(u, "w")
    value = np.cbrt(u) - 9.0 * np.sqrt(u) / 8.0
    return _scalar_or_array(value)


def _quad(func: Callable[[float], float], name: str, tol: float) -> float:
    result = integrate.quad(
        func, 0.0, 1.0, epsabs=tol, epsrel=0.0, limit=500, full_output=1
    )
    value, abserr = result[0], result[1]
    # A fourth element is only returned when QUADPACK reports a problem.
    if len(result) > 3 or abserr > tol:
        raise QuadratureFailure(
            f"Quadrature of {name} did not reach the absolute tolerance {tol:g} "
            f"(estimated error {abserr:.3g})."
        )
    return float(value)


@dataclass(frozen=True)
class WeightSpec:
    """
    A weight function on (0, 1) and, when available, its first two derivatives.

    The zero-integral condition is checked by quadrature at construction.
    Constants are computed once on first access of ``constants``.
    """

    id: WeightId
    func: Callable
    first_derivative: Optional[Callable] = None
    second_derivative: Optional[Callable] = None

    def __post_init__(self):
        total = _quad(lambda u: self.func(u), "the weight integral", DEFAULT_TOL)
        if abs(total) > CENTERING_TOL:
            raise WeightNotCentered(
                f"A weight must integrate to zero over (0, 1); got {total:.3g}."
            )

    def eval(self, u):
        return self.func(u)

    @cached_property
    def constants(self) -> WeightConstants:
        return _compute_constants(self, DEFAULT_TOL)


def _compute_constants(spec: WeightSpec, tol: float) -> WeightConstants:
    f = spec.func
    h = -_quad(lambda u: f(u) * np.log(u), "h", tol)
    if h <= 0.0:
        raise DomainError(
            f"The weight {spec.id.value} has h = {h:.3g}; log-spectral estimators "
            "need a strictly positive h."
        )
    varsigma = psi_bar_dd = None
    if spec.first_derivative is not None:
        d1 = spec.first_derivative
        varsigma = _quad(lambda u: d1(u) ** 2, "varsigma", tol)
    if spec.second_derivative is not None:
        d2 = spec.second_derivative
        psi_bar_dd = _quad(lambda u: d2(u) * np.log(u), "psi_bar_dd", tol)
    phi_sq = 0.5 * _quad(lambda u: f(u) ** 2, "phi_sq", tol)
    u2_moment = _quad(lambda u: u**2 * f(u), "u2_moment", tol)
    log.debug(
        "Weight %s constants: h=%s varsigma=%s psi_bar_dd=%s phi_sq=%s",
        spec.id.value, h, varsigma, psi_bar_dd, phi_sq,
    )
    return WeightConstants(
        h=h, varsigma=varsigma, psi_bar_dd=psi_bar_dd, phi_sq=phi_sq, u2_moment=u2_moment
    )


def weight_constants(spec: WeightSpec, tol: float = DEFAULT_TOL) -> WeightConstants:
    """
    Integral constants of ``spec`` to absolute tolerance ``tol``.

    The default tolerance is served from the cache held by the spec.
    """
    if tol == DEFAULT_TOL:
        return spec.constants
    return _compute_constants(spec, tol)


def discrete_h_bar(spec: WeightSpec, k: int) -> float:
    """-k^{-1} sum_{p=1}^k f(p/k) log(p/k), the discrete counterpart of h."""
    if k < 2:
        raise DomainError(f"The band count must be at least 2, got k = {k}.")
    u = np.arange(1, k + 1) / k
    return float(-np.sum(spec.eval(u) * np.log(u)) / k)


@lru_cache(maxsize=256)
def band_weights(spec: WeightSpec, k: int) -> Tuple[np.ndarray, float]:
    """Weights f(p/k), p = 1..k, together with discrete_h_bar(spec, k)."""
    values = np.asarray(spec.eval(np.arange(1, k + 1) / k), dtype=float)
    values.setflags(write=False)
    return values, discrete_h_bar(spec, k)


def tabulated_weight(u, values) -> WeightSpec:
    """
    Build a USER_TABULATED weight from nodes ``u`` (strictly increasing, inside
    (0, 1)) by cubic-spline interpolation.

    Only the zero integral is validated; smoothness of the interpolant near the
    end points is the caller's responsibility.
    """
    u = np.asarray(u, dtype=float)
    values = np.asarray(values, dtype=float)
    if u.ndim != 1 or u.shape != values.shape or u.size < 4:
        raise DomainError("A tabulated weight needs at least 4 (u, value) pairs.")
    if np.any(u <= 0.0) or np.any(u >= 1.0) or np.any(np.diff(u) <= 0.0):
        raise DomainError("Tabulated u must be strictly increasing inside (0, 1).")
    spline = interpolate.CubicSpline(u, values, extrapolate=True)
    return WeightSpec(
        id=WeightId.USER_TABULATED,
        func=_SplineEval(spline, 0),
        first_derivative=_SplineEval(spline, 1),
        second_derivative=_SplineEval(spline, 2),
    )


class _SplineEval:
    """Picklable evaluator of a spline or one of its derivatives."""

    def __init__(self, spline, nu: int):
        self.spline = spline
        self.nu = nu

    def __call__(self, u):
        arr = np.asarray(u, dtype=float)
        return _scalar_or_array(np.asarray(self.spline(arr, nu=self.nu)))


PSI_PAPER = WeightSpec(
    id=WeightId.PSI_PAPER,
    func=psi,
    first_derivative=psi_prime,
    second_derivative=psi_second,
)
# w' is not square integrable at 0, so only the value-based constants exist.
W_PAPER = WeightSpec(id=WeightId.W_PAPER, func=w)
