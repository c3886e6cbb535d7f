"""End-to-end separation: weight resolution, NN/NNP estimation, recovery and sweeps."""
import dataclasses
import logging
import math
from typing import Iterable, List, NamedTuple, Optional

import numpy as np
import pandas as pd

from core.errors import NotFoundError, PeakSharpError
from core.lorentzian import max_safe_weight
from core.metrics import metric_bundle
from core.models import (DataMatrix, LineshapeFit, MixingMatrix, ScenarioConfig, SeparationReport,
                         Spectrum, UnmixOptions, WeightSpec)
from core.models.options import DEFAULT_FRACTION
from core.peakfit import fit_mixture_lines, sharpen_fit
from core.recovery import recover_sources
from core.signal import estimate_min_hwhm, sharpen_matrix, suggest_weight
from core.synth import generate
from core.vca import estimate_mixing

logger = logging.getLogger(__name__)

DEFAULT_K_RANGE = tuple(range(5, 101, 5))
DEFAULT_SNR_RANGE = tuple(range(30, 121, 10))
MISFIT_WARN_RATIO = 3.0


class ResolvedWeight(NamedTuple):
    k: float
    hwhm: Optional[float]
    warnings: List[str]


def estimate_hwhm(X: DataMatrix, prominence: float = 0.5) -> float:
    """Narrowest half width found on any mixture row."""
    widths = []
    for row in X.rows():
        try:
            widths.append(estimate_min_hwhm(row, prominence).hwhm_axis)
        except NotFoundError:
            continue
    if not widths:
        raise NotFoundError("no measurable peak on any mixture row")
    return min(widths)


def resolve_weight(X: DataMatrix, spec: WeightSpec, prominence: float = 0.5,
                   hwhm: Optional[float] = None) -> ResolvedWeight:
    """Weight k for ``spec``; ``hwhm`` overrides the width measured on X."""
    if spec.mode == "off":
        return ResolvedWeight(0.0, None, [])

    warnings = []
    if hwhm is None:
        try:
            hwhm = estimate_hwhm(X, prominence)
        except NotFoundError:
            if spec.mode == "auto":
                raise
            warnings.append("no peak found to check the weight against")
    k = suggest_weight(hwhm, spec.value) if spec.mode == "auto" else spec.value

    if hwhm is not None and k > max_safe_weight(hwhm):
        message = (f"k={k:g} exceeds the nonnegativity bound {max_safe_weight(hwhm):.4g} "
                   f"for estimated hwhm={hwhm:.4g}")
        logger.warning(message)
        warnings.append(message)
    return ResolvedWeight(float(k), hwhm, warnings)


def _misfit_warnings(X: DataMatrix, lines: LineshapeFit) -> List[str]:
    if lines.misfit_ratio > MISFIT_WARN_RATIO and lines.residual_rms > 1e-6 * float(np.abs(X.values).max()):
        message = (f"line model residual rms {lines.residual_rms:.3g} is {lines.misfit_ratio:.1f} times "
                   f"the noise level; lines may be missing or not Lorentzian")
        logger.warning(message)
        return [message]
    return []


def separate(X: DataMatrix, n: int, options: Optional[UnmixOptions] = None,
             truth: Optional[MixingMatrix] = None,
             true_sources: Optional[List[Spectrum]] = None) -> SeparationReport:
    """Estimate A on X, sharpened for NNP, then recover S from the original X.

    NNP sharpens either the samples or, with ``sharpen_method="model"``, a
    joint Lorentzian fit of the rows in closed form.
    """
    options = options or UnmixOptions()
    lines = None
    if options.method == "nnp" and options.sharpen_method == "model":
        lines = fit_mixture_lines(X)
        weight = resolve_weight(X, options.weight, options.prominence, hwhm=lines.min_hwhm)
        weight.warnings.extend(_misfit_warnings(X, lines))
    else:
        weight = resolve_weight(X, options.weight, options.prominence)
    warnings = list(weight.warnings)

    if X.negative_count():
        warnings.append(f"{X.negative_count()} negative input entries")
    if lines is not None:
        A_est, scores = estimate_mixing(sharpen_fit(lines, weight.k), n, options)
    else:
        A_est, scores = estimate_mixing(X, n, options, weight_k=weight.k)

    sources = recover_sources(X, A_est, options.recovery_mode, options.mu, options.n_jobs)
    if options.recovery_mode == "pinv":
        negatives = sum(int(np.count_nonzero(s.values < 0)) for s in sources)
        if negatives:
            warnings.append(f"pinv recovery produced {negatives} negative samples, clamped to 0")
        sources = [s.with_values(np.maximum(s.values, 0.0)) for s in sources]

    report = SeparationReport(estimated_a=A_est, estimated_s=sources, scores=scores,
                              method=options.method, weight_k=weight.k,
                              hwhm_estimate=weight.hwhm, lines=lines, warnings=warnings)
    if truth is not None and truth.n == A_est.n:
        report = dataclasses.replace(report, metrics=metric_bundle(truth, A_est, true_sources, sources))
    return report


def _comon_or_nan(X, n, options, truth) -> tuple:
    try:
        report = separate(X, n, options, truth=truth)
        return report.metrics.comon_index, report.weight_k, "; ".join(report.warnings)
    except PeakSharpError as e:
        logger.warning("sweep point failed: %s", e)
        return math.nan, math.nan, str(e)


def k_sweep(X: DataMatrix, n: int, truth: MixingMatrix, ks: Iterable[float] = DEFAULT_K_RANGE,
            options: Optional[UnmixOptions] = None) -> pd.DataFrame:
    """Comon index of the NNP estimate for each fixed weight k."""
    base = options or UnmixOptions()
    try:
        hwhm = estimate_hwhm(X, base.prominence)
    except NotFoundError:
        hwhm = None
    rows = []
    for k in ks:
        opts = UnmixOptions.model_validate({**base.model_dump(), "method": "nnp",
                                            "weight": {"mode": "fixed", "value": float(k)}})
        index, _, note = _comon_or_nan(X, n, opts, truth)
        rows.append({
            "k": float(k),
            "comon_index": index,
            "safe": hwhm is not None and k <= max_safe_weight(hwhm),
            "note": note,
        })
    return pd.DataFrame(rows, columns=["k", "comon_index", "safe", "note"])


def snr_sweep(config: ScenarioConfig, snrs: Iterable[float] = DEFAULT_SNR_RANGE,
              options: Optional[UnmixOptions] = None, seed: Optional[int] = None) -> pd.DataFrame:
    """NN and NNP Comon indices on the scenario mixtures at each noise level.

    Every level reuses the same seed, so noise realizations differ only in scale.
    Without ``options`` NNP sharpens the fitted line model.
    """
    base = options or UnmixOptions(sharpen_method="model")
    n = config.n_sources
    rows = []
    for snr in snrs:
        run = generate(config, snr_db=float(snr), seed=seed)
        nn = UnmixOptions.model_validate({**base.model_dump(), "method": "nn"})
        nnp_weight = base.weight if base.weight.mode != "off" else WeightSpec(mode="auto", value=DEFAULT_FRACTION)
        nnp = UnmixOptions.model_validate({**base.model_dump(), "method": "nnp",
                                           "weight": nnp_weight.model_dump()})
        nn_index, _, nn_note = _comon_or_nan(run.mixtures, n, nn, run.mixing)
        nnp_index, k, nnp_note = _comon_or_nan(run.mixtures, n, nnp, run.mixing)
        rows.append({"snr_db": float(snr), "nn_index": nn_index, "nnp_index": nnp_index,
                     "k": k, "note": "; ".join(filter(None, [nn_note, nnp_note]))})
    return pd.DataFrame(rows, columns=["snr_db", "nn_index", "nnp_index", "k", "note"])


def sharpen_mixtures(X: DataMatrix, spec: WeightSpec, prominence: float = 0.5,
                     clamp_negative: bool = True, n_jobs: Optional[int] = None,
                     method: str = "difference"):
    """Sharpen every mixture row with the resolved weight; returns (matrix, meta record).

    ``method="model"`` sharpens a joint line fit of the rows instead of the samples.
    """
    lines = None
    if method == "model" and spec.mode != "off":
        lines = fit_mixture_lines(X)
        weight = resolve_weight(X, spec, prominence, hwhm=lines.min_hwhm)
        weight.warnings.extend(_misfit_warnings(X, lines))
        sharpened = sharpen_fit(lines, weight.k)
        clamped = sharpened.negative_count()
        if clamp_negative:
            sharpened = sharpened.clamped()
    else:
        weight = resolve_weight(X, spec, prominence)
        sharpened, clamped = sharpen_matrix(X, weight.k, clamp_negative=clamp_negative, n_jobs=n_jobs)
    if clamped:
        weight.warnings.append(f"{clamped} negative samples after sharpening"
                               + (" were clamped to 0" if clamp_negative else ""))
    record = {
        "weight": str(spec),
        "k": weight.k,
        "hwhm_estimate": weight.hwhm,
        "max_safe_weight": None if weight.hwhm is None else max_safe_weight(weight.hwhm),
        "clamp_negative": clamp_negative,
        "clamped_samples": clamped,
        "method": method,
        "lines": None if lines is None else lines.to_dict(),
        "warnings": weight.warnings,
    }
    return sharpened, record
