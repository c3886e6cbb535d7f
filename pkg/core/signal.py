"""Sampled spectra: the sharpening operator P s = s - k s'' and width estimation."""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy.signal import find_peaks
from scipy.stats import median_abs_deviation

from core.errors import DomainError, NotFoundError, SizeError
from core.lorentzian import max_safe_weight
from core.models import DataMatrix, PeakEstimate, Spectrum
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)


def _second_difference(values: np.ndarray, dx: float) -> np.ndarray:
    p = values.size
    if p < 3:
        raise SizeError(f"second difference needs at least 3 samples, got {p}")
    out = np.empty_like(values)
    out[1:-1] = values[:-2] - 2.0 * values[1:-1] + values[2:]
    if p >= 4:
        # one-sided, second order
        out[0] = 2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]
        out[-1] = 2.0 * values[-1] - 5.0 * values[-2] + 4.0 * values[-3] - values[-4]
    else:
        out[0] = values[0] - 2.0 * values[1] + values[2]
        out[-1] = out[0]
    return out / (dx * dx)


def second_difference(s: Spectrum) -> Spectrum:
    return s.with_values(_second_difference(s.values, s.dx))


def _sharpen_values(values: np.ndarray, dx: float, k: float) -> np.ndarray:
    if k == 0:
        return values.copy()
    return values - k * _second_difference(values, dx)


def sharpen(s: Spectrum, k: float, clamp_negative: bool = True) -> Spectrum:
    """Apply s - k s''. ``k`` is in axis units squared, so results do not depend on dx."""
    if k < 0:
        raise DomainError(f"sharpening weight must be nonnegative, got {k}")
    values = _sharpen_values(s.values, s.dx, k)
    if clamp_negative:
        values = np.maximum(values, 0.0)
    return s.with_values(values)


def sharpen_matrix(X: DataMatrix, k: float, clamp_negative: bool = True,
                   n_jobs: Optional[int] = None) -> Tuple[DataMatrix, int]:
    """Sharpen every row of X.

    Returns the sharpened matrix and the number of samples that sharpening drove
    below zero. Samples that were already negative in X are not counted.
    """
    if k < 0:
        raise DomainError(f"sharpening weight must be nonnegative, got {k}")
    rows = parallel_map(lambda row: _sharpen_values(row, X.dx, k), list(X.values), n_jobs=n_jobs)
    values = np.vstack(rows)
    clamped = int(np.count_nonzero((values < 0) & (X.values >= 0)))
    if clamp_negative and np.any(values < 0):
        logger.info("sharpening with k=%g drove %d samples negative", k, clamped)
        values = np.maximum(values, 0.0)
    return X.with_values(values), clamped


def _half_crossings(values: np.ndarray, index: int) -> Tuple[Optional[float], Optional[float]]:
    half = values[index] / 2.0
    p = values.size

    j = index
    while j > 0 and values[j] > half:
        j -= 1
    left = None
    if values[j] <= half:
        crossing = j + (half - values[j]) / (values[j + 1] - values[j])
        left = index - crossing

    j = index
    while j < p - 1 and values[j] > half:
        j += 1
    right = None
    if values[j] <= half:
        crossing = j - 1 + (values[j - 1] - half) / (values[j - 1] - values[j])
        right = crossing - index

    return left, right


def estimate_min_hwhm(s: Spectrum, prominence: float = 0.5) -> PeakEstimate:
    """Narrowest half width at half maximum among peaks above prominence * max(s).

    Each side is located by walking to the first sample at or below half height
    and interpolating linearly. A peak's width is the smaller of its two sides,
    since a neighbouring peak can only widen one of them.
    """
    if not 0 < prominence < 1:
        raise DomainError(f"prominence must lie in (0, 1), got {prominence}")
    values = s.values
    top = float(values.max())
    if top <= 0:
        raise NotFoundError("spectrum has no positive samples")

    indices, _ = find_peaks(values, height=prominence * top)
    best = None
    for index in indices:
        sides = [d for d in _half_crossings(values, int(index)) if d is not None]
        if not sides:
            continue
        hwhm = max(min(sides), 1.0)
        if best is None or hwhm < best.hwhm_samples:
            best = PeakEstimate(index=int(index), height=float(values[index]),
                                hwhm_samples=float(hwhm), hwhm_axis=float(hwhm * s.dx))
    if best is None:
        raise NotFoundError(f"no peak above {prominence:g} of the maximum with a measurable half width")
    logger.debug("narrowest peak at sample %d, hwhm %.4g", best.index, best.hwhm_axis)
    return best


def suggest_weight(w_estimate: float, fraction: float = 1.0) -> float:
    if not 0 < fraction <= 1:
        raise DomainError(f"weight fraction must lie in (0, 1], got {fraction}")
    return fraction * max_safe_weight(w_estimate)


NOISE_MIN_SAMPLES = 32
# std of a second difference of unit white noise
_SECOND_DIFFERENCE_GAIN = np.sqrt(6.0)


def estimate_noise_sigma(values) -> np.ndarray:
    """Per-row white-noise level from the MAD of second differences.

    Smooth line shapes contribute little curvature away from the peak tops, so
    the median of |d2 x| tracks the noise. Rows shorter than
    ``NOISE_MIN_SAMPLES`` give 0: too few samples for a usable estimate.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] < NOISE_MIN_SAMPLES:
        return np.zeros(values.shape[0])
    curvature = np.diff(values, n=2, axis=1)
    return median_abs_deviation(curvature, axis=1, scale="normal") / _SECOND_DIFFERENCE_GAIN
