"""Closed-form Lorentzian algebra.

Every formula is written for a peak centred at 0 and applied to u = x - center.
With L(u) = w^2 h / (u^2 + w^2) the weighted sharpened profile is

    D_k(u) = L(u) - k L''(u)
           = w^2 h (u^4 + 2(w^2 - 3k) u^2 + w^4 + 2k w^2) / (u^2 + w^2)^3

which stays nonnegative for every u exactly when k <= 8/9 w^2.
"""
from typing import NamedTuple

import numpy as np

from core.errors import DomainError
from core.models.peak import SAFE_WEIGHT_RATIO, LorentzPeak

GRID_HALF_SPAN = 20.0
GRID_POINTS = 100_001


class GridMinimum(NamedTuple):
    x: float
    value: float


def _offset(peak: LorentzPeak, x):
    return np.asarray(x, dtype=float) - peak.center


def _require_weight(k: float) -> None:
    if k < 0:
        raise DomainError(f"sharpening weight must be nonnegative, got {k}")


def evaluate(peak: LorentzPeak, x):
    u = _offset(peak, x)
    w2 = peak.hwhm ** 2
    return w2 * peak.height / (u * u + w2)


def first_derivative(peak: LorentzPeak, x):
    u = _offset(peak, x)
    w2 = peak.hwhm ** 2
    return -2.0 * w2 * peak.height * u / (u * u + w2) ** 2


def second_derivative(peak: LorentzPeak, x):
    u = _offset(peak, x)
    w2 = peak.hwhm ** 2
    return 2.0 * w2 * peak.height * (3.0 * u * u - w2) / (u * u + w2) ** 3


def third_derivative(peak: LorentzPeak, x):
    u = _offset(peak, x)
    w2 = peak.hwhm ** 2
    return 24.0 * w2 * peak.height * u * (w2 - u * u) / (u * u + w2) ** 4


def sign_numerator(peak: LorentzPeak, k: float, x):
    """Quartic N_k(u) = u^4 + 2(w^2 - 3k)u^2 + w^4 + 2k w^2; sign(N_k) = sign(D_k)."""
    _require_weight(k)
    u2 = _offset(peak, x) ** 2
    w2 = peak.hwhm ** 2
    return u2 * u2 + 2.0 * (w2 - 3.0 * k) * u2 + w2 * w2 + 2.0 * k * w2


def sharpened(peak: LorentzPeak, k: float, x):
    _require_weight(k)
    u2 = _offset(peak, x) ** 2
    w2 = peak.hwhm ** 2
    return w2 * peak.height * sign_numerator(peak, k, x) / (u2 + w2) ** 3


def numerator_argmin(w: float, k: float) -> float:
    """Nonnegative offset where N_k is smallest: sqrt(3k - w^2) once k > w^2/3, else 0."""
    if not w > 0:
        raise DomainError(f"half-width must be positive, got {w}")
    _require_weight(k)
    excess = 3.0 * k - w * w
    return float(np.sqrt(excess)) if excess > 0 else 0.0


def max_safe_weight(w: float) -> float:
    if not w > 0:
        raise DomainError(f"half-width must be positive, got {w}")
    return SAFE_WEIGHT_RATIO * w * w


def sharpening_factor(w: float, k: float) -> float:
    """Peak-height gain D_k(0) / L(0) = 1 + 2k / w^2."""
    if not w > 0:
        raise DomainError(f"half-width must be positive, got {w}")
    _require_weight(k)
    return 1.0 + 2.0 * k / (w * w)


def verification_grid(peak: LorentzPeak, points: int = GRID_POINTS) -> np.ndarray:
    half = GRID_HALF_SPAN * peak.hwhm
    return np.linspace(peak.center - half, peak.center + half, points)


def grid_minimum(peak: LorentzPeak, k: float, points: int = GRID_POINTS) -> GridMinimum:
    """Smallest sampled value of D_k over center +/- 20 w."""
    xs = verification_grid(peak, points)
    values = sharpened(peak, k, xs)
    i = int(np.argmin(values))
    return GridMinimum(x=float(xs[i]), value=float(values[i]))
