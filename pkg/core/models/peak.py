from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.errors import DomainError

SAFE_WEIGHT_RATIO = 8.0 / 9.0


class LorentzPeak(BaseModel):
    """Analytic Lorentzian line: height * hwhm^2 / ((x - center)^2 + hwhm^2)."""

    model_config = ConfigDict(frozen=True)

    center: float = 0.0
    hwhm: float = Field(..., description="half width at half maximum (w = FWHM / 2)")
    height: float = 1.0

    @field_validator("hwhm", "height")
    @classmethod
    def validate_positive(cls, v, info):
        if not v > 0:
            raise ValueError(f"{info.field_name} must be positive, got {v}")
        return v

    @property
    def fwhm(self) -> float:
        return 2.0 * self.hwhm


class SharpenWeight(BaseModel):
    """Sharpening weight k together with the half-width it was chosen for.

    Construction enforces 0 < k <= 8/9 * w_ref^2. Experiments that push past
    the bound go through ``SharpenWeight.unchecked``.
    """

    model_config = ConfigDict(frozen=True)

    k: float
    w_ref: float

    @model_validator(mode="after")
    def validate_bound(self):
        if not self.w_ref > 0:
            raise ValueError(f"w_ref must be positive, got {self.w_ref}")
        if not self.k > 0:
            raise ValueError(f"k must be positive, got {self.k}")
        limit = SAFE_WEIGHT_RATIO * self.w_ref ** 2
        if self.k > limit:
            raise ValueError(f"k={self.k} exceeds the nonnegativity bound {limit} for w={self.w_ref}")
        return self

    @classmethod
    def unchecked(cls, k: float, w_ref: float) -> "SharpenWeight":
        if not w_ref > 0 or k < 0:
            raise DomainError(f"invalid weight k={k}, w_ref={w_ref}")
        return cls.model_construct(k=float(k), w_ref=float(w_ref))

    @property
    def is_safe(self) -> bool:
        return 0 < self.k <= SAFE_WEIGHT_RATIO * self.w_ref ** 2
