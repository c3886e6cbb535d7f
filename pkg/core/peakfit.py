"""Joint Lorentzian line fit of the mixture rows.

Every row of X = AS is a nonnegative combination of the same source lines, so
the rows share line centers and widths and differ only in heights. Fitting that
model once and sharpening it in closed form gives a noise-free input for the
cone estimator; sharpening the samples directly amplifies white noise by
roughly k * sqrt(6) / dx^2.
"""
import logging
from typing import Optional

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks, peak_widths

from core import lorentzian
from core.errors import DomainError, NotFoundError, NumericalError
from core.models import DataMatrix, LineshapeFit, LorentzPeak
from core.nnls import nnls_solve
from core.signal import estimate_noise_sigma

logger = logging.getLogger(__name__)

# line detection threshold: fraction of the tallest line, and multiple of the noise
REL_PROMINENCE = 0.05
NOISE_PROMINENCE = 8.0
FIT_TOL = 1e-10
# centers may move this many initial half widths during the fit
CENTER_SLACK = 3.0


def _unit_lines(axis: np.ndarray, centers: np.ndarray, hwhms: np.ndarray) -> np.ndarray:
    """K x p matrix of unit-height lines."""
    u = axis[None, :] - centers[:, None]
    w2 = (hwhms ** 2)[:, None]
    return w2 / (u * u + w2)


def _line_derivatives(axis, centers, hwhms):
    u = axis[None, :] - centers[:, None]
    w = hwhms[:, None]
    denom = (u * u + w * w) ** 2
    return 2.0 * w * w * u / denom, 2.0 * w * u * u / denom


def detect_lines(X: DataMatrix, noise_sigma: Optional[np.ndarray] = None,
                 rel_prominence: float = REL_PROMINENCE,
                 noise_prominence: float = NOISE_PROMINENCE):
    """Line positions (sample indices) and half widths (axis units) on the row sum."""
    if noise_sigma is None:
        noise_sigma = estimate_noise_sigma(X.values)
    profile = X.values.sum(axis=0)
    top = float(profile.max())
    if top <= 0:
        raise NotFoundError("mixture rows have no positive samples")
    threshold = max(rel_prominence * top, noise_prominence * float(np.sqrt(np.sum(noise_sigma ** 2))))
    indices, _ = find_peaks(profile, prominence=threshold)
    if indices.size == 0:
        raise NotFoundError(f"no line with prominence above {threshold:.3g} on the row sum")
    widths = peak_widths(profile, indices, rel_height=0.5)[0]
    hwhms = np.maximum(0.5 * widths, 1.0) * X.dx
    logger.debug("detected %d lines at samples %s", indices.size, indices.tolist())
    return indices, hwhms


def fit_mixture_lines(X: DataMatrix, rel_prominence: float = REL_PROMINENCE,
                      noise_prominence: float = NOISE_PROMINENCE,
                      max_nfev: Optional[int] = None) -> LineshapeFit:
    """Least-squares fit of shared line centers and widths with per-row heights >= 0."""
    noise_sigma = estimate_noise_sigma(X.values)
    indices, hwhm0 = detect_lines(X, noise_sigma, rel_prominence, noise_prominence)
    axis = X.origin + X.dx * np.arange(X.p)
    centers0 = axis[indices]
    m, K = X.m, indices.size

    basis = _unit_lines(axis, centers0, hwhm0)
    heights0 = np.vstack([nnls_solve(basis.T, row).x for row in X.values])
    heights0 = np.maximum(heights0, 1e-12 * max(float(heights0.max()), 1.0))

    def unpack(theta):
        return theta[:K], theta[K:2 * K], theta[2 * K:].reshape(m, K)

    def residuals(theta):
        centers, hwhms, heights = unpack(theta)
        return (heights @ _unit_lines(axis, centers, hwhms) - X.values).ravel()

    def jacobian(theta):
        centers, hwhms, heights = unpack(theta)
        lines = _unit_lines(axis, centers, hwhms)
        d_center, d_width = _line_derivatives(axis, centers, hwhms)
        J = np.zeros((m, X.p, 2 * K + m * K))
        for i in range(m):
            J[i, :, :K] = (heights[i][:, None] * d_center).T
            J[i, :, K:2 * K] = (heights[i][:, None] * d_width).T
            J[i, :, 2 * K + i * K:2 * K + (i + 1) * K] = lines.T
        return J.reshape(m * X.p, -1)

    span = axis[-1] - axis[0]
    lower = np.concatenate([np.maximum(centers0 - CENTER_SLACK * hwhm0, axis[0]),
                            np.full(K, 0.25 * X.dx), np.zeros(m * K)])
    upper = np.concatenate([np.minimum(centers0 + CENTER_SLACK * hwhm0, axis[-1]),
                            np.full(K, max(span, X.dx)), np.full(m * K, np.inf)])
    theta0 = np.clip(np.concatenate([centers0, hwhm0, heights0.ravel()]), lower, upper)

    result = least_squares(residuals, theta0, jac=jacobian, bounds=(lower, upper), method="trf",
                           x_scale="jac", ftol=FIT_TOL, xtol=FIT_TOL, gtol=FIT_TOL, max_nfev=max_nfev)
    if result.status < 0:
        raise NumericalError(f"line fit failed: {result.message}")
    if result.status == 0:
        logger.warning("line fit stopped at the evaluation limit: %s", result.message)

    centers, hwhms, heights = unpack(result.x)
    order = np.argsort(centers, kind="stable")
    rms = float(np.sqrt(np.mean(result.fun ** 2)))
    logger.info("fitted %d lines, residual rms %.3g", K, rms)
    return LineshapeFit(centers=centers[order], hwhms=hwhms[order], heights=heights[:, order],
                        dx=X.dx, origin=X.origin, p=X.p, residual_rms=rms,
                        noise_sigma=noise_sigma, labels=X.labels)


def model_matrix(fit: LineshapeFit) -> DataMatrix:
    values = fit.heights @ _unit_lines(fit.axis, fit.centers, fit.hwhms)
    return DataMatrix(values, dx=fit.dx, origin=fit.origin, labels=fit.labels)


def sharpen_fit(fit: LineshapeFit, k: float) -> DataMatrix:
    """Closed-form s - k s'' of every fitted row, sampled on the data grid."""
    if k < 0:
        raise DomainError(f"sharpening weight must be nonnegative, got {k}")
    lines = np.vstack([lorentzian.sharpened(LorentzPeak(center=float(c), hwhm=float(w)), k, fit.axis)
                       for c, w in zip(fit.centers, fit.hwhms)])
    return DataMatrix(fit.heights @ lines, dx=fit.dx, origin=fit.origin, labels=fit.labels)
