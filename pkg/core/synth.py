"""Synthetic Lorentzian sources, mixing and calibrated Gaussian noise."""
import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from core import lorentzian
from core.errors import ConfigError, DataError, DimensionError
from core.models import DataMatrix, MixingMatrix, ScenarioConfig, SourceSpec, Spectrum

logger = logging.getLogger(__name__)

SAP_SUPPORT_HWHM = 10.0


class SyntheticRun(NamedTuple):
    sources: List[Spectrum]
    mixing: MixingMatrix
    mixtures: DataMatrix
    windows: List[Tuple[int, int]]


def _as_array(S) -> np.ndarray:
    if isinstance(S, DataMatrix):
        return S.values
    if isinstance(S, (list, tuple)) and S and isinstance(S[0], Spectrum):
        return np.vstack([s.values for s in S])
    return np.atleast_2d(np.asarray(S, dtype=float))


def _sample_source(source: SourceSpec, axis: np.ndarray, truncate: bool) -> np.ndarray:
    values = np.zeros_like(axis)
    for peak in source.peaks:
        line = lorentzian.evaluate(peak, axis)
        if truncate:
            line = np.where(np.abs(axis - peak.center) <= SAP_SUPPORT_HWHM * peak.hwhm, line, 0.0)
        values += line
    return values


def _default_dps_window(source: SourceSpec, axis: np.ndarray) -> Tuple[int, int]:
    tallest = max(source.peaks, key=lambda peak: peak.height)
    inside = np.flatnonzero(np.abs(axis - tallest.center) <= tallest.hwhm)
    if inside.size == 0:
        inside = np.array([int(np.argmin(np.abs(axis - tallest.center)))])
    return int(inside[0]), int(inside[-1]) + 1


def _stand_alone_window(S: np.ndarray, i: int) -> Optional[Tuple[int, int]]:
    others = np.delete(S, i, axis=0)
    alone = (S[i] > 0) & np.all(others == 0, axis=0)
    hits = np.flatnonzero(alone)
    if hits.size == 0:
        return None
    # first contiguous run
    breaks = np.flatnonzero(np.diff(hits) > 1)
    stop = hits[breaks[0]] if breaks.size else hits[-1]
    return int(hits[0]), int(stop) + 1


def dominance_ratio(S, i: int, window: Tuple[int, int]) -> float:
    """max of the other sources over the window divided by the max of source i there."""
    S = _as_array(S)
    start, stop = window
    block = S[:, start:stop]
    if block.shape[1] == 0:
        raise DimensionError(f"empty window {window}")
    dominant = float(block[i].max())
    if dominant <= 0:
        return math.inf
    others = np.delete(block, i, axis=0)
    return float(others.max()) / dominant if others.size else 0.0


def satisfies_nna(S) -> bool:
    """True when every source has a sample where it alone is nonzero."""
    S = _as_array(S)
    return all(_stand_alone_window(S, i) is not None for i in range(S.shape[0]))


def _check_sap(config: ScenarioConfig, S: np.ndarray) -> List[Tuple[int, int]]:
    windows = []
    for i, source in enumerate(config.sources):
        window = source.dominant_window
        if window is None:
            window = _stand_alone_window(S, i)
            if window is None:
                raise ConfigError(f"source {i} has no stand-alone peak; widen the spacing between peaks")
        start, stop = window
        others = np.delete(S[:, start:stop], i, axis=0)
        if np.any(others != 0):
            raise ConfigError(f"source {i}: other sources are nonzero on window [{start}, {stop})")
        if not np.any(S[i, start:stop] > 0):
            raise ConfigError(f"source {i} is zero on its own window [{start}, {stop})")
        windows.append((int(start), int(stop)))
    return windows


def _check_dps(config: ScenarioConfig, S: np.ndarray, axis: np.ndarray) -> List[Tuple[int, int]]:
    windows = []
    for i, source in enumerate(config.sources):
        window = source.dominant_window or _default_dps_window(source, axis)
        ratio = dominance_ratio(S, i, window)
        if ratio > config.epsilon_level:
            raise ConfigError(
                f"source {i}: dominance ratio {ratio:.4g} on window [{window[0]}, {window[1]}) "
                f"exceeds epsilon_level={config.epsilon_level:g}")
        windows.append((int(window[0]), int(window[1])))
    return windows


def synth_sources(config: ScenarioConfig) -> List[Spectrum]:
    return _synthesize(config)[0]


def _synthesize(config: ScenarioConfig) -> Tuple[List[Spectrum], List[Tuple[int, int]]]:
    axis = config.grid.axis()
    sap = config.condition == "sap"
    S = np.vstack([_sample_source(source, axis, truncate=sap) for source in config.sources])
    windows = _check_sap(config, S) if sap else _check_dps(config, S, axis)
    spectra = [Spectrum(row, dx=config.grid.dx, origin=config.grid.origin, label=source.label or f"s{i}")
               for i, (row, source) in enumerate(zip(S, config.sources))]
    return spectra, windows


def mix(A: MixingMatrix, S: Sequence[Spectrum]) -> DataMatrix:
    if A.n != len(S):
        raise DimensionError(f"mixing matrix has {A.n} columns but {len(S)} sources were given")
    values = A.values @ _as_array(list(S))
    return DataMatrix(values, dx=S[0].dx, origin=S[0].origin, labels=tuple(f"x{i}" for i in range(A.m)))


def add_noise(X: DataMatrix, snr_db: Optional[float], seed: int = 0) -> DataMatrix:
    """Add white Gaussian noise at ``snr_db`` relative to the mean squared entry of X.

    Samples come from numpy's PCG64 generator seeded with ``seed``; results
    are clamped at 0. ``None`` or +inf leaves X untouched.
    """
    if snr_db is None or (math.isinf(snr_db) and snr_db > 0):
        return X
    power = float(np.mean(X.values ** 2))
    if power == 0:
        raise DataError("cannot calibrate noise against an all-zero data matrix")
    sigma = math.sqrt(power / 10.0 ** (snr_db / 10.0))
    rng = np.random.default_rng(seed)
    noisy = X.values + rng.normal(0.0, sigma, size=X.values.shape)
    return X.with_values(np.maximum(noisy, 0.0))


def generate(config: ScenarioConfig, snr_db: Optional[float] = None,
             seed: Optional[int] = None) -> SyntheticRun:
    """Sources, ground-truth mixing and (optionally noisy) mixtures for a scenario."""
    sources, windows = _synthesize(config)
    mixing = MixingMatrix(config.mixing_array())
    X = mix(mixing, sources)
    snr_db = config.snr_db if snr_db is None else snr_db
    X = add_noise(X, snr_db, config.seed if seed is None else seed)
    logger.info("synthesized %s: %d sources, %d mixtures, p=%d, snr=%s dB",
                config.name, len(sources), X.m, X.p, snr_db)
    return SyntheticRun(sources=sources, mixing=mixing, mixtures=X, windows=windows)
