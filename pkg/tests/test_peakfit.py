import numpy as np
import pytest

from core import lorentzian
from core.errors import NotFoundError
from core.models import DataMatrix, LorentzPeak
from core.peakfit import detect_lines, fit_mixture_lines, model_matrix, sharpen_fit
from core.signal import estimate_noise_sigma
from core.synth import add_noise

LINES = [LorentzPeak(center=40.0, hwhm=2.5), LorentzPeak(center=75.0, hwhm=4.0),
         LorentzPeak(center=130.0, hwhm=3.0)]
HEIGHTS = np.array([[1.0, 0.3, 0.6],
                    [0.2, 0.9, 0.5]])


def lines_matrix(heights=HEIGHTS, p=800, dx=0.25):
    axis = dx * np.arange(p)
    S = np.vstack([lorentzian.evaluate(line, axis) for line in LINES])
    return DataMatrix(heights @ S, dx=dx)


def test_detect_lines_on_the_row_sum():
    indices, hwhms = detect_lines(lines_matrix())
    np.testing.assert_array_equal(indices, [160, 300, 520])
    np.testing.assert_allclose(hwhms, [2.5, 4.0, 3.0], rtol=0.1)


def test_detect_lines_needs_a_positive_sample():
    with pytest.raises(NotFoundError):
        detect_lines(DataMatrix(np.zeros((2, 50))))


def test_noiseless_fit_is_exact():
    X = lines_matrix()
    fit = fit_mixture_lines(X)
    assert fit.n_lines == 3
    np.testing.assert_allclose(fit.centers, [40.0, 75.0, 130.0], atol=1e-6)
    np.testing.assert_allclose(fit.hwhms, [2.5, 4.0, 3.0], atol=1e-6)
    np.testing.assert_allclose(fit.heights, HEIGHTS, atol=1e-6)
    assert fit.min_hwhm == pytest.approx(2.5, abs=1e-6)
    np.testing.assert_allclose(model_matrix(fit).values, X.values, atol=1e-6)


def test_sharpened_fit_matches_the_closed_form():
    X = lines_matrix()
    fit = fit_mixture_lines(X)
    k = 0.7 * lorentzian.max_safe_weight(fit.min_hwhm)
    axis = X.dx * np.arange(X.p)
    expected = HEIGHTS @ np.vstack([lorentzian.sharpened(line, k, axis) for line in LINES])
    sharpened = sharpen_fit(fit, k)
    np.testing.assert_allclose(sharpened.values, expected, atol=1e-5)
    assert sharpened.negative_count() == 0


def test_fit_under_noise_stays_close():
    X = add_noise(lines_matrix(), 30.0, seed=4)
    fit = fit_mixture_lines(X)
    np.testing.assert_allclose(fit.centers, [40.0, 75.0, 130.0], atol=0.1)
    np.testing.assert_allclose(fit.hwhms, [2.5, 4.0, 3.0], rtol=0.05)
    np.testing.assert_allclose(fit.heights, HEIGHTS, atol=0.03)
    assert fit.misfit_ratio < 3.0


def test_noise_level_of_white_noise():
    noise = np.random.default_rng(1).normal(0.0, 0.01, size=(2, 5000))
    np.testing.assert_allclose(estimate_noise_sigma(noise), [0.01, 0.01], rtol=0.1)


def test_noise_level_needs_enough_samples():
    np.testing.assert_array_equal(estimate_noise_sigma(np.ones((2, 10))), [0.0, 0.0])
