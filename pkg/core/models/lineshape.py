from dataclasses import dataclass, field

import numpy as np

from core.errors import DimensionError


@dataclass(frozen=True)
class LineshapeFit:
    """Mixture rows fitted as nonnegative combinations of shared Lorentzian lines.

    Line j has center ``centers[j]`` and half width ``hwhms[j]`` in axis units;
    row i carries it with height ``heights[i, j]``.
    """

    centers: np.ndarray
    hwhms: np.ndarray
    heights: np.ndarray
    dx: float
    origin: float
    p: int
    residual_rms: float
    noise_sigma: np.ndarray
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        heights = np.atleast_2d(np.asarray(self.heights, dtype=float))
        centers = np.asarray(self.centers, dtype=float)
        hwhms = np.asarray(self.hwhms, dtype=float)
        if centers.shape != hwhms.shape or heights.shape[1] != centers.size:
            raise DimensionError(
                f"{centers.size} centers, {hwhms.size} widths and heights of shape {heights.shape}")
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "hwhms", hwhms)

    @property
    def n_lines(self) -> int:
        return self.centers.size

    @property
    def m(self) -> int:
        return self.heights.shape[0]

    @property
    def min_hwhm(self) -> float:
        return float(self.hwhms.min())

    @property
    def axis(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.p)

    @property
    def misfit_ratio(self) -> float:
        """Fit residual rms over the estimated noise rms; about 1 for a complete line list."""
        noise = float(np.sqrt(np.mean(self.noise_sigma ** 2)))
        return self.residual_rms / noise if noise > 0 else float("inf")

    def to_dict(self) -> dict:
        return {
            "centers": self.centers.tolist(),
            "hwhms": self.hwhms.tolist(),
            "heights": self.heights.tolist(),
            "residual_rms": float(self.residual_rms),
            "noise_sigma": self.noise_sigma.tolist(),
        }
