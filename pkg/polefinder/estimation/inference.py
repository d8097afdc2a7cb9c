"""
Asymptotic confidence intervals for the pole location and the memory parameter.

Both are plug-in intervals: the unknown memory parameter in the variance of
the pole estimate is replaced by its two-step estimate.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

from scipy import stats

from polefinder.errors import AlphaNonPositive, DomainError
from polefinder.estimation.estimators import MemoryEstimate, PoleEstimate, Regime
from polefinder.spectral.weights import PSI_PAPER, W_PAPER, WeightConstants

log = logging.getLogger(__name__)

# Weight of the point mass at the boundary in the limit law at 0 or pi.
BOUNDARY_POINT_MASS = 0.5
# Ratio of the two-step sampling variance to the Phi^2 / h_w^2 constant.
INTERIOR_VARIANCE_FACTOR = 2.0


def normal_quantile(p: float) -> float:
    return float(stats.norm.ppf(p))


def _check_level(level: float):
    if not 0.5 < level < 1.0:
        raise DomainError(f"Confidence level must lie in (0.5, 1), got {level}.")


@dataclass(frozen=True)
class PoleCI:
    center: float
    half_width: float
    regime: Regime
    point_mass_at_boundary: float
    level: float
    Psi: float

    @property
    def lower(self) -> float:
        if self.regime is Regime.AT_ZERO:
            return 0.0
        if self.regime is Regime.AT_PI:
            return max(0.0, math.pi - self.half_width)
        return max(0.0, self.center - self.half_width)

    @property
    def upper(self) -> float:
        if self.regime is Regime.AT_ZERO:
            return min(math.pi, self.half_width)
        if self.regime is Regime.AT_PI:
            return math.pi
        return min(math.pi, self.center + self.half_width)

    def covers(self, lambda0: float) -> bool:
        return self.lower <= lambda0 <= self.upper

    def as_dict(self) -> dict:
        return {
            "center": self.center,
            "half_width": self.half_width,
            "lower": self.lower,
            "upper": self.upper,
            "regime": self.regime.value,
            "point_mass_at_boundary": self.point_mass_at_boundary,
            "level": self.level,
            "Psi": self.Psi,
        }


@dataclass(frozen=True)
class BiasInputs:
    """
    Expert inputs for the bias of the two-step estimate: ``c`` from m = c n^{4/5}
    and ``log_g_dd``, the second derivative of log g at the pole.
    """

    c: float
    log_g_dd: float


@dataclass(frozen=True)
class AlphaCI:
    center: float
    half_width: float
    level: float
    bias_correction: float
    variance: float

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def covers(self, alpha: float) -> bool:
        return self.lower <= alpha <= self.upper

    def as_dict(self) -> dict:
        return {
            "center": self.center,
            "half_width": self.half_width,
            "lower": self.lower,
            "upper": self.upper,
            "level": self.level,
            "bias_correction": self.bias_correction,
            "variance": self.variance,
        }


def pole_ci(
    est: PoleEstimate,
    alpha_hat: float,
    n: Optional[int] = None,
    k: Optional[int] = None,
    psi_constants: Optional[WeightConstants] = None,
    level: float = 0.95,
) -> PoleCI:
    """
    Confidence interval for the pole location.

    With Psi = varsigma / (psi_bar_dd * alpha)^2 and scale 2 pi sqrt(k) / n, an
    interior estimate gets lambda_hat +/- z_{(1+level)/2} scale sqrt(Psi). At 0
    the limit law puts mass 1/2 on the boundary and is half-normal above it, so
    the interval is [0, z_level scale sqrt(Psi)]; pi is handled by reflection.

    Parameters
    ----------
    est : PoleEstimate
        Output of the pole search; n and k default to its profile's.
    alpha_hat : float
        Plug-in memory estimate, normally the two-step estimate.
    psi_constants : WeightConstants, optional
        Constants of the pole-search weight; defaults to the built-in psi.
    level : float
        Confidence level in (0.5, 1).

    Raises
    ------
    AlphaNonPositive
        If alpha_hat <= 0, where the variance is undefined.
    """
    _check_level(level)
    if alpha_hat <= 0.0:
        raise AlphaNonPositive(
            f"The pole interval needs a positive memory estimate, got {alpha_hat}."
        )
    n = est.n if n is None else n
    k = est.profile.k if k is None else k
    constants = psi_constants or PSI_PAPER.constants
    if constants.varsigma is None or not constants.psi_bar_dd:
        raise DomainError(
            "The pole-search weight lacks the derivative constants needed for Psi."
        )

    Psi = constants.varsigma / (constants.psi_bar_dd * alpha_hat) ** 2
    scale = 2.0 * math.pi * math.sqrt(k) / n * math.sqrt(Psi)
    regime = est.boundary_regime
    if regime is Regime.INTERIOR:
        half_width = normal_quantile(0.5 * (1.0 + level)) * scale
        point_mass = 0.0
    else:
        half_width = normal_quantile(level) * scale
        point_mass = BOUNDARY_POINT_MASS
    return PoleCI(
        center=est.lambda_hat,
        half_width=half_width,
        regime=regime,
        point_mass_at_boundary=point_mass,
        level=level,
        Psi=Psi,
    )


def alpha_ci(
    est: MemoryEstimate,
    m: Optional[int] = None,
    w_constants: Optional[WeightConstants] = None,
    level: float = 0.95,
    bias_inputs: Optional[BiasInputs] = None,
    regime: Regime = Regime.INTERIOR,
) -> AlphaCI:
    """
    Normal interval for the memory parameter from the two-step estimate.

    ``variance`` is the variance of the sqrt(2m)-normalised statistic. The two
    halves of the symmetrised band are independent in the interior, giving
    2 Phi^2 / h_w^2. At 0 or pi they fold onto the same ordinates and the
    variance doubles again, so pass the anchor's ``regime``.

    The asymptotic bias depends on the unobservable curvature of log g at the
    pole and is only removed when ``bias_inputs`` are supplied; otherwise
    ``bias_correction`` is 0.
    """
    _check_level(level)
    m = est.band if m is None else m
    if m < 2:
        raise DomainError(f"The band count m must be at least 2, got {m}.")
    constants = w_constants or W_PAPER.constants

    variance = INTERIOR_VARIANCE_FACTOR * constants.phi_sq / constants.h**2
    if regime is not Regime.INTERIOR:
        variance *= 2.0
    half_width = normal_quantile(0.5 * (1.0 + level)) * math.sqrt(variance / (2.0 * m))
    bias_correction = 0.0
    if bias_inputs is not None:
        bias_correction = (
            4.0
            * math.pi**2
            * bias_inputs.c**2.5
            * bias_inputs.log_g_dd
            * constants.u2_moment
            / (math.sqrt(2.0) * constants.h * math.sqrt(2.0 * m))
        )
        log.debug("Removing bias %s from the two-step estimate", bias_correction)
    return AlphaCI(
        center=est.alpha - bias_correction,
        half_width=half_width,
        level=level,
        bias_correction=bias_correction,
        variance=variance,
    )
