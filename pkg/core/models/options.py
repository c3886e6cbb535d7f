from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

DEFAULT_FRACTION = 0.7


class WeightSpec(BaseModel):
    """How the sharpening weight is chosen: off, a fixed k, or a fraction of k_opt."""

    mode: Literal["off", "fixed", "auto"] = "off"
    value: float = 0.0

    @model_validator(mode="after")
    def validate_value(self):
        if self.mode == "fixed" and not self.value > 0:
            raise ValueError(f"fixed weight must be positive, got {self.value}")
        if self.mode == "auto" and not 0 < self.value <= 1:
            raise ValueError(f"auto fraction must lie in (0, 1], got {self.value}")
        return self

    @classmethod
    def parse(cls, text: str) -> "WeightSpec":
        """Parse ``off``, ``auto``, ``auto:<fraction>`` or a real number."""
        text = text.strip().lower()
        if text == "off":
            return cls(mode="off")
        if text.startswith("auto"):
            _, _, fraction = text.partition(":")
            return cls(mode="auto", value=float(fraction) if fraction else DEFAULT_FRACTION)
        return cls(mode="fixed", value=float(text))

    def __str__(self) -> str:
        if self.mode == "off":
            return "off"
        if self.mode == "auto":
            return f"auto:{self.value:g}"
        return f"{self.value:g}"


class UnmixOptions(BaseModel):
    method: Literal["nn", "nnp"] = "nn"
    weight: WeightSpec = Field(default_factory=WeightSpec)
    drop_tol: float = 1e-6
    min_angle_deg: float = 2.0
    collinear_tol: Optional[float] = 1e-9
    clamp_negative: bool = True
    prominence: float = 0.5
    recovery_mode: Literal["auto", "nnls", "l1", "pinv"] = "auto"
    mu: Optional[float] = None
    n_jobs: Optional[int] = None
    noise_floor: Optional[float] = 5.0
    sharpen_method: Literal["difference", "model"] = "difference"

    @field_validator("drop_tol")
    @classmethod
    def validate_drop_tol(cls, v):
        if not 0 <= v < 1:
            raise ValueError(f"drop_tol must lie in [0, 1), got {v}")
        return v

    @field_validator("noise_floor")
    @classmethod
    def validate_noise_floor(cls, v):
        if v is not None and v < 0:
            raise ValueError(f"noise_floor must be nonnegative, got {v}")
        return v

    @field_validator("min_angle_deg")
    @classmethod
    def validate_angle(cls, v):
        if not 0 <= v < 90:
            raise ValueError(f"min_angle_deg must lie in [0, 90), got {v}")
        return v

    @field_validator("prominence")
    @classmethod
    def validate_prominence(cls, v):
        if not 0 < v < 1:
            raise ValueError(f"prominence must lie in (0, 1), got {v}")
        return v

    @model_validator(mode="after")
    def validate_method(self):
        if self.method == "nnp" and self.weight.mode == "off":
            self.weight = WeightSpec(mode="auto", value=DEFAULT_FRACTION)
        if self.method == "nn":
            self.weight = WeightSpec(mode="off")
        return self
