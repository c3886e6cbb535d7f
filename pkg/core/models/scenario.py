import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from core.models.peak import LorentzPeak


class GridSpec(BaseModel):
    p: int = Field(..., description="number of samples")
    dx: float = 1.0
    origin: float = 0.0

    @field_validator("p")
    @classmethod
    def validate_p(cls, v):
        if v < 3:
            raise ValueError(f"grid needs p >= 3 samples, got {v}")
        return v

    @field_validator("dx")
    @classmethod
    def validate_dx(cls, v):
        if not v > 0:
            raise ValueError(f"dx must be positive, got {v}")
        return v

    @property
    def span(self) -> Tuple[float, float]:
        return self.origin, self.origin + self.dx * (self.p - 1)

    def axis(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.p)


class SourceSpec(BaseModel):
    label: str = ""
    peaks: List[LorentzPeak]
    dominant_window: Optional[Tuple[int, int]] = Field(
        None, description="half-open sample interval [start, stop) where this source dominates")

    @field_validator("peaks")
    @classmethod
    def validate_peaks(cls, v):
        if not v:
            raise ValueError("a source needs at least one peak")
        return v

    @field_validator("dominant_window")
    @classmethod
    def validate_window(cls, v):
        if v is not None and not 0 <= v[0] < v[1]:
            raise ValueError(f"dominant window must satisfy 0 <= start < stop, got {v}")
        return v


class ScenarioConfig(BaseModel):
    name: str = "scenario"
    grid: GridSpec
    sources: List[SourceSpec]
    mixing: List[List[float]]
    condition: Literal["sap", "dps"] = "dps"
    epsilon_level: float = 0.0
    snr_db: Optional[float] = None
    seed: int = 0

    @field_validator("mixing")
    @classmethod
    def validate_mixing(cls, v):
        if not v or not v[0]:
            raise ValueError("mixing matrix is empty")
        width = len(v[0])
        for i, row in enumerate(v):
            if len(row) != width:
                raise ValueError(f"mixing row {i} has {len(row)} entries, expected {width}")
            if any(a < 0 or not math.isfinite(a) for a in row):
                raise ValueError(f"mixing row {i} must hold finite nonnegative entries")
        return v

    @model_validator(mode="after")
    def validate_consistency(self):
        n = len(self.sources)
        if len(self.mixing[0]) != n:
            raise ValueError(f"mixing has {len(self.mixing[0])} columns but {n} sources are declared")
        if self.epsilon_level < 0:
            raise ValueError("epsilon_level must be nonnegative")
        if (self.condition == "sap") != (self.epsilon_level == 0):
            raise ValueError("epsilon_level must be 0 exactly when condition is sap")
        low, high = self.grid.span
        for i, source in enumerate(self.sources):
            for peak in source.peaks:
                if not low <= peak.center <= high:
                    raise ValueError(f"source {i}: peak center {peak.center} outside grid span [{low}, {high}]")
            if source.dominant_window is not None and source.dominant_window[1] > self.grid.p:
                raise ValueError(f"source {i}: dominant window {source.dominant_window} exceeds p={self.grid.p}")
        return self

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    def mixing_array(self) -> np.ndarray:
        return np.asarray(self.mixing, dtype=float)
