from dataclasses import dataclass, field

import numpy as np

from core.errors import DomainError, SizeError


@dataclass(frozen=True)
class Spectrum:
    """A signal sampled on the uniform grid origin + i * dx, i = 0..p-1."""

    values: np.ndarray
    dx: float = 1.0
    origin: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise SizeError(f"spectrum values must be one-dimensional, got shape {values.shape}")
        if values.size < 3:
            raise SizeError(f"spectrum needs at least 3 samples, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise SizeError("spectrum contains non-finite values")
        if not self.dx > 0:
            raise DomainError(f"dx must be positive, got {self.dx}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "origin", float(self.origin))

    def __len__(self) -> int:
        return self.values.size

    @property
    def axis(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.values.size)

    def with_values(self, values: np.ndarray) -> "Spectrum":
        return Spectrum(values, dx=self.dx, origin=self.origin, label=self.label)

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))


@dataclass(frozen=True)
class PeakEstimate:
    index: int
    height: float
    hwhm_samples: float
    hwhm_axis: float
