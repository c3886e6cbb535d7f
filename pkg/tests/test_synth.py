import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.errors import ConfigError, DataError, DimensionError
from core.models import DataMatrix, MixingMatrix, ScenarioConfig, Spectrum
from core.synth import (add_noise, dominance_ratio, generate, mix, satisfies_nna, synth_sources)


def test_two_source_scenario_shapes(load_scenario):
    config = load_scenario("two_source_dps")
    run = generate(config)
    assert len(run.sources) == 2
    assert run.mixtures.values.shape == (2, 400)
    assert run.mixing.values.shape == (2, 2)
    assert [s.label for s in run.sources] == ["s1", "s2"]
    assert run.sources[0].dx == 0.25


def test_noiseless_mixtures_are_exact_products(load_scenario):
    run = generate(load_scenario("three_source_sap"))
    S = np.vstack([s.values for s in run.sources])
    np.testing.assert_allclose(run.mixtures.values, run.mixing.values @ S, rtol=0, atol=1e-15)
    np.testing.assert_array_equal(run.mixing.values, load_scenario("three_source_sap").mixing_array())


def test_sap_scenario_satisfies_the_stand_alone_assumption(load_scenario):
    run = generate(load_scenario("three_source_sap"))
    assert satisfies_nna(run.sources)
    for i, window in enumerate(run.windows):
        assert dominance_ratio(run.sources, i, window) == 0.0


@pytest.mark.parametrize("name", ["two_source_dps", "three_source_dps"])
def test_dps_windows_respect_the_epsilon_level(load_scenario, name):
    config = load_scenario(name)
    run = generate(config)
    assert not satisfies_nna(run.sources)
    for i, window in enumerate(run.windows):
        assert dominance_ratio(run.sources, i, window) <= config.epsilon_level


def test_dps_level_too_small(load_scenario):
    with pytest.raises(ConfigError, match="dominance ratio"):
        synth_sources(load_scenario("two_source_dps", epsilon_level=0.1))


def test_sap_window_shared_with_another_source(load_scenario):
    config = load_scenario("three_source_sap")
    sources = [source.model_dump() for source in config.sources]
    sources[0]["dominant_window"] = [450, 550]
    with pytest.raises(ConfigError, match="source 0"):
        synth_sources(ScenarioConfig.model_validate({**config.model_dump(), "sources": sources}))


def test_sap_default_window_is_found():
    config = ScenarioConfig.model_validate({
        "grid": {"p": 200, "dx": 1.0},
        "condition": "sap",
        "mixing": [[1.0, 0.5], [0.5, 1.0]],
        "sources": [
            {"peaks": [{"center": 50.0, "hwhm": 1.0}]},
            {"peaks": [{"center": 150.0, "hwhm": 1.0}]},
        ],
    })
    run = generate(config)
    assert run.windows == [(40, 61), (140, 161)]
    assert [s.label for s in run.sources] == ["s0", "s1"]


def test_dominance_ratio_values():
    S = np.array([[0.0, 1.0, 2.0, 0.0], [0.5, 0.2, 0.1, 1.0]])
    assert dominance_ratio(S, 0, (1, 3)) == pytest.approx(0.1)
    assert dominance_ratio(S, 0, (3, 4)) == math.inf
    with pytest.raises(DimensionError):
        dominance_ratio(S, 0, (2, 2))


@pytest.mark.parametrize("change, message", [
    ({"grid": {"p": 2, "dx": 1.0}}, "grid"),
    ({"mixing": [[0.6, 0.8, 0.1], [0.8, 0.6, 0.1]]}, "columns"),
    ({"condition": "sap"}, "epsilon_level"),
    ({"mixing": [[0.6, -0.8], [0.8, 0.6]]}, "nonnegative"),
])
def test_invalid_scenarios(load_scenario, change, message):
    raw = {**load_scenario("two_source_dps").model_dump(), **change}
    with pytest.raises(ValidationError, match=message):
        ScenarioConfig.model_validate(raw)


def test_mix_checks_source_count():
    A = MixingMatrix([[0.6, 0.8], [0.8, 0.6]])
    with pytest.raises(DimensionError):
        mix(A, [Spectrum([1.0, 0.0, 0.0])])


def test_noise_is_seeded_and_nonnegative():
    X = DataMatrix(np.abs(np.random.default_rng(0).normal(size=(2, 50))))
    first = add_noise(X, 20.0, seed=5)
    again = add_noise(X, 20.0, seed=5)
    other = add_noise(X, 20.0, seed=6)
    np.testing.assert_array_equal(first.values, again.values)
    assert not np.array_equal(first.values, other.values)
    assert first.negative_count() == 0


def test_noise_power_is_calibrated():
    X = DataMatrix(np.full((2, 5000), 10.0))
    noisy = add_noise(X, 20.0, seed=1)
    noise_power = float(np.mean((noisy.values - X.values) ** 2))
    assert noise_power == pytest.approx(100.0 / 100.0, rel=0.1)


def test_noise_disabled():
    X = DataMatrix(np.ones((2, 4)))
    assert add_noise(X, None) is X
    assert add_noise(X, math.inf) is X
    with pytest.raises(DataError):
        add_noise(DataMatrix(np.zeros((2, 4))), 30.0)


def test_generate_is_deterministic(load_scenario):
    config = load_scenario("two_source_dps")
    first = generate(config, snr_db=40.0)
    second = generate(config, snr_db=40.0)
    np.testing.assert_array_equal(first.mixtures.values, second.mixtures.values)
    assert not np.array_equal(first.mixtures.values, generate(config).mixtures.values)


def test_mix_is_linear_in_both_arguments():
    rng = np.random.default_rng(12)
    S1 = [Spectrum(rng.random(50)) for _ in range(2)]
    S2 = [Spectrum(rng.random(50)) for _ in range(2)]
    A1 = MixingMatrix(rng.random((3, 2)))
    A2 = MixingMatrix(rng.random((3, 2)))
    combined = [Spectrum(2.0 * a.values + 0.5 * b.values) for a, b in zip(S1, S2)]

    np.testing.assert_allclose(mix(A1, combined).values,
                               2.0 * mix(A1, S1).values + 0.5 * mix(A1, S2).values, atol=1e-12)
    np.testing.assert_allclose(mix(MixingMatrix(A1.values + 3.0 * A2.values), S1).values,
                               mix(A1, S1).values + 3.0 * mix(A2, S1).values, atol=1e-12)
