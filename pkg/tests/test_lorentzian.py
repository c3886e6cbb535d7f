import math

import numpy as np
import pytest
from pydantic import ValidationError

from core import lorentzian
from core.errors import DomainError
from core.models import LorentzPeak, SharpenWeight

SATURATING_HWHM = 3.0 / (2.0 * math.sqrt(2.0))


def test_evaluate_peak_values():
    peak = LorentzPeak(center=2.0, hwhm=0.5, height=3.0)
    values = lorentzian.evaluate(peak, [2.0, 2.5, 1.5])
    np.testing.assert_allclose(values, [3.0, 1.5, 1.5])


def test_fwhm_is_twice_hwhm():
    assert LorentzPeak(hwhm=1.25).fwhm == 2.5


@pytest.mark.parametrize("bad", [{"hwhm": 0.0}, {"hwhm": -1.0}, {"hwhm": 1.0, "height": 0.0}])
def test_peak_rejects_nonpositive_parameters(bad):
    with pytest.raises(ValidationError):
        LorentzPeak(**bad)


def test_derivatives_match_finite_differences():
    peak = LorentzPeak(center=1.0, hwhm=2.0, height=3.0)
    xs = np.linspace(-10.0, 10.0, 41)

    h = 1e-5
    numeric = (lorentzian.evaluate(peak, xs + h) - lorentzian.evaluate(peak, xs - h)) / (2 * h)
    np.testing.assert_allclose(lorentzian.first_derivative(peak, xs), numeric, atol=1e-7)

    h = 1e-4
    numeric = (lorentzian.evaluate(peak, xs + h) - 2 * lorentzian.evaluate(peak, xs)
               + lorentzian.evaluate(peak, xs - h)) / h ** 2
    np.testing.assert_allclose(lorentzian.second_derivative(peak, xs), numeric, atol=1e-6)

    h = 1e-5
    numeric = (lorentzian.second_derivative(peak, xs + h)
               - lorentzian.second_derivative(peak, xs - h)) / (2 * h)
    np.testing.assert_allclose(lorentzian.third_derivative(peak, xs), numeric, atol=1e-6)


def test_sharpened_is_profile_minus_weighted_curvature():
    peak = LorentzPeak(center=-3.0, hwhm=1.5, height=2.0)
    xs = np.linspace(-20.0, 15.0, 201)
    k = 1.7
    expected = lorentzian.evaluate(peak, xs) - k * lorentzian.second_derivative(peak, xs)
    np.testing.assert_allclose(lorentzian.sharpened(peak, k, xs), expected, rtol=1e-12, atol=1e-14)


def test_sign_numerator_has_the_sign_of_the_sharpened_profile():
    peak = LorentzPeak(hwhm=1.0, height=1.0)
    xs = np.linspace(-5.0, 5.0, 1001)
    k = 1.5  # above the bound, so both signs occur
    numerator = lorentzian.sign_numerator(peak, k, xs)
    assert np.any(numerator < 0) and np.any(numerator > 0)
    np.testing.assert_array_equal(np.sign(numerator), np.sign(lorentzian.sharpened(peak, k, xs)))


def test_weight_at_the_bound_saturates_nonnegativity():
    peak = LorentzPeak(hwhm=SATURATING_HWHM, height=1.0)
    assert lorentzian.max_safe_weight(SATURATING_HWHM) == pytest.approx(1.0)
    minimum = lorentzian.grid_minimum(peak, 1.0)
    assert -1e-9 <= minimum.value <= 1e-6


def test_narrower_peak_goes_negative_at_the_same_weight():
    peak = LorentzPeak(hwhm=0.95 * SATURATING_HWHM, height=1.0)
    assert lorentzian.grid_minimum(peak, 1.0).value < -1e-6


@pytest.mark.parametrize("w", [0.5, 1.0, 5.0, 20.0])
def test_max_safe_weight_is_tight(w):
    peak = LorentzPeak(center=3.0, hwhm=w, height=1.0)
    k_opt = lorentzian.max_safe_weight(w)
    assert k_opt == pytest.approx(8.0 / 9.0 * w * w)

    at_bound = lorentzian.grid_minimum(peak, k_opt)
    assert -1e-9 <= at_bound.value <= 1e-6
    # the zero of D sits where the quartic numerator bottoms out
    offset = abs(at_bound.x - peak.center)
    assert offset == pytest.approx(lorentzian.numerator_argmin(w, k_opt), abs=1e-3 * w)

    assert lorentzian.grid_minimum(peak, 1.1 * k_opt).value < 0


@pytest.mark.parametrize("w", [0.5, 1.0, 5.0, 20.0])
def test_sharpening_factor_at_the_bound(w):
    assert lorentzian.sharpening_factor(w, lorentzian.max_safe_weight(w)) == pytest.approx(25.0 / 9.0, rel=1e-12)


def test_sharpening_factor_matches_peak_height_gain():
    peak = LorentzPeak(center=0.0, hwhm=2.0, height=1.5)
    k = 2.0
    gain = lorentzian.sharpened(peak, k, 0.0) / lorentzian.evaluate(peak, 0.0)
    assert gain == pytest.approx(lorentzian.sharpening_factor(2.0, k))
    assert lorentzian.sharpening_factor(2.0, 0.0) == 1.0


def test_numerator_argmin_location():
    w, k = 2.0, 3.0
    peak = LorentzPeak(hwhm=w)
    xs = lorentzian.verification_grid(peak)
    numerator = lorentzian.sign_numerator(peak, k, xs)
    found = abs(xs[int(np.argmin(numerator))])
    assert found == pytest.approx(math.sqrt(3 * k - w * w), abs=1e-3)
    # below w^2 / 3 the quartic is smallest at the centre
    assert lorentzian.numerator_argmin(w, 1.0) == 0.0


def test_verification_grid_spans_twenty_half_widths():
    peak = LorentzPeak(center=5.0, hwhm=0.5)
    xs = lorentzian.verification_grid(peak)
    assert xs.size == lorentzian.GRID_POINTS
    assert xs[0] == pytest.approx(-5.0)
    assert xs[-1] == pytest.approx(15.0)


def test_domain_errors():
    peak = LorentzPeak(hwhm=1.0)
    with pytest.raises(DomainError):
        lorentzian.sharpened(peak, -0.1, 0.0)
    with pytest.raises(DomainError):
        lorentzian.max_safe_weight(0.0)
    with pytest.raises(DomainError):
        lorentzian.sharpening_factor(-1.0, 1.0)
    with pytest.raises(DomainError):
        lorentzian.numerator_argmin(1.0, -2.0)


def test_sharpen_weight_enforces_the_bound():
    weight = SharpenWeight(k=0.8, w_ref=1.0)
    assert weight.is_safe
    with pytest.raises(ValidationError):
        SharpenWeight(k=0.9, w_ref=1.0)
    with pytest.raises(ValidationError):
        SharpenWeight(k=0.0, w_ref=1.0)

    pushed = SharpenWeight.unchecked(2.0, 1.0)
    assert pushed.k == 2.0
    assert not pushed.is_safe
    with pytest.raises(DomainError):
        SharpenWeight.unchecked(1.0, 0.0)
