"""Gaussian confidence machinery.

Maps two-sided containment probabilities to sigma multipliers and rescales
accuracy figures between confidence levels. Two arithmetic modes exist:

* ``exact``  - full-precision quantiles.
* ``paper``  - sigma multipliers rounded to two decimals before use
  (1.96 at 95%, 6.11 at 99.999999%, ratio 3.12), matching the rounded
  constants used in published requirement tables.

Both modes are first-class; callers pick one via ``quantile_mode``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError

__all__ = [
    "EXACT",
    "PAPER",
    "CONF_95",
    "CONF_FULL_INTEGRITY",
    "IntegritySpec",
    "standard_normal_cdf",
    "standard_normal_pdf",
    "standard_normal_quantile",
    "two_sided_sigma",
    "confidence_ratio",
    "rescale_accuracy",
    "validate_mode",
]

EXACT = "exact"
PAPER = "paper"

# standard two-sided confidence levels used throughout
CONF_95 = 0.95
CONF_FULL_INTEGRITY = 1.0 - 1e-9

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def validate_mode(mode: str) -> str:
    if mode not in (EXACT, PAPER):
        raise InvalidArgumentError(
            f"quantile_mode must be {EXACT!r} or {PAPER!r}, got {mode!r}")
    return mode


def standard_normal_cdf(z: float) -> float:
    """Phi(z) via the complementary error function (abs error << 1e-12 for |z| <= 8)."""
    if not math.isfinite(z):
        raise InvalidArgumentError(f"z must be finite, got {z!r}")
    return 0.5 * math.erfc(-z / _SQRT2)


def standard_normal_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


# Rational approximation coefficients (Acklam): |relative error| < 1.2e-9,
# used only as the initial guess before Newton refinement.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)

_TAIL_SPLIT = 0.02425


def _rational_central(p: float) -> float:
    q = p - 0.5
    r = q * q
    num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
    den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
    return q * num / den

def _rational_lower_tail(p: float) -> float:
    # quantile for small lower-tail mass p (returns negative z)
    q = math.sqrt(-2.0 * math.log(p))
    num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
    return num / den


def _upper_tail_quantile(q: float) -> float:
    """z > 0 with upper-tail mass Q(z) = q, for 0 < q <= 0.5.

    Newton refinement runs on the tail mass itself, so accuracy is limited
    only by erfc (far below 1e-9 relative in z out past z = 6.5), not by
    cancellation in 1 - p.
    """
    if q >= 0.5:
        return 0.0 if q == 0.5 else -_upper_tail_quantile(1.0 - q)
    if q > _TAIL_SPLIT:
        z = -_rational_central(q)
    else:
        z = -_rational_lower_tail(q)
    for _ in range(2):
        # f(z) = Q(z) - q, f'(z) = -pdf(z); Q(z) = erfc(z/sqrt2)/2
        tail = 0.5 * math.erfc(z / _SQRT2)
        z += (tail - q) / standard_normal_pdf(z)
    return z


def standard_normal_quantile(p: float) -> float:
    """Inverse of standard_normal_cdf, 1e-9 relative in z out to z = 6.5."""
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p!r}")
    if p >= 0.5:
        return _upper_tail_quantile(1.0 - p)
    return -_upper_tail_quantile(p)


def two_sided_sigma(confidence: float) -> float:
    """z such that Phi(z) - Phi(-z) = confidence.

    The half-tail mass (1 - confidence)/2 is formed before any quantile
    arithmetic; for confidence >= 0.5 the subtraction is exact, so the
    result is accurate even at 1 - 1e-9.
    """
    if not 0.0 < confidence < 1.0:
        raise InvalidArgumentError(
            f"confidence must lie in (0, 1), got {confidence!r}")
    return _upper_tail_quantile((1.0 - confidence) / 2.0)


def _sigma_for_mode(confidence: float, mode: str) -> float:
    z = two_sided_sigma(confidence)
    return round(z, 2) if mode == PAPER else z


def confidence_ratio(high: float, low: float, mode: str = EXACT) -> float:
    """two_sided_sigma(high) / two_sided_sigma(low).

    In paper mode both sigmas are rounded to two decimals and so is their
    quotient; (1-1e-9, 0.95) then yields exactly 3.12.
    """
    validate_mode(mode)
    ratio = _sigma_for_mode(high, mode) / _sigma_for_mode(low, mode)
    return round(ratio, 2) if mode == PAPER else ratio


def rescale_accuracy(value: float, conf_from: float, conf_to: float,
                     mode: str = EXACT) -> float:
    """Rescale a containment radius from one confidence level to another."""
    if value < 0.0:
        raise InvalidArgumentError(f"value must be >= 0, got {value!r}")
    validate_mode(mode)
    if conf_from == conf_to:
        return value
    if mode == PAPER:
        # apply the rounded ratio in the direction the paper divides
        if conf_to < conf_from:
            return value / confidence_ratio(conf_from, conf_to, PAPER)
        return value * confidence_ratio(conf_to, conf_from, PAPER)
    return value * two_sided_sigma(conf_to) / two_sided_sigma(conf_from)


@dataclass(frozen=True, slots=True)
class IntegritySpec:
    """A two-sided containment probability with its derived sigma multiplier."""

    confidence: float
    sigma_multiplier: float

    def __post_init__(self) -> None:
        if not 0.0 < self.confidence < 1.0:
            raise InvalidArgumentError(
                f"confidence must lie in (0, 1), got {self.confidence!r}")
        z = two_sided_sigma(self.confidence)
        if abs(self.sigma_multiplier - z) > 1e-6:
            raise InvalidArgumentError(
                f"sigma_multiplier {self.sigma_multiplier!r} does not match "
                f"confidence {self.confidence!r} (expected {z!r})")

    @classmethod
    def from_confidence(cls, confidence: float) -> "IntegritySpec":
        return cls(confidence, two_sided_sigma(confidence))
