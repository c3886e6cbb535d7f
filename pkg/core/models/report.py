import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from core.errors import DataError, DimensionError
from core.models.lineshape import LineshapeFit
from core.models.matrices import ColumnScores, MixingMatrix
from core.models.spectrum import Spectrum


@dataclass(frozen=True)
class MetricBundle:
    comon_index: float
    per_source_cosine: np.ndarray
    column_assignment: np.ndarray

    def to_dict(self) -> dict:
        return {
            "comon_index": None if math.isnan(self.comon_index) else float(self.comon_index),
            "per_source_cosine": [float(c) for c in self.per_source_cosine],
            "column_assignment": [int(j) for j in self.column_assignment],
        }


@dataclass(frozen=True)
class SeparationReport:
    estimated_a: MixingMatrix
    estimated_s: list[Spectrum]
    scores: ColumnScores
    method: Literal["nn", "nnp"]
    weight_k: float = 0.0
    hwhm_estimate: Optional[float] = None
    lines: Optional[LineshapeFit] = None
    metrics: Optional[MetricBundle] = None
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.estimated_s) != self.estimated_a.n:
            raise DimensionError(
                f"{len(self.estimated_s)} recovered sources for {self.estimated_a.n} mixing columns")
        if any(np.any(s.values < 0) for s in self.estimated_s):
            raise DataError("recovered sources must be nonnegative")

    @property
    def source_matrix(self) -> np.ndarray:
        return np.vstack([s.values for s in self.estimated_s])

    def to_dict(self) -> dict:
        indices = self.estimated_a.column_indices
        return {
            "method": self.method,
            "weight_k": float(self.weight_k),
            "hwhm_estimate": None if self.hwhm_estimate is None else float(self.hwhm_estimate),
            "selected_columns": [] if indices is None else [int(j) for j in indices],
            "mixing": self.estimated_a.values.tolist(),
            "sources": self.source_matrix.tolist(),
            "kept_indices": self.scores.kept_indices.tolist(),
            "scores": self.scores.scores.tolist(),
            "lines": None if self.lines is None else self.lines.to_dict(),
            "metrics": None if self.metrics is None else self.metrics.to_dict(),
            "warnings": list(self.warnings),
        }
