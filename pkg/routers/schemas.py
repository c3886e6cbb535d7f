from typing import List, Optional

from pydantic import BaseModel, field_validator

from core.models import DataMatrix, WeightSpec
from utils.validation import validate_weight_text


class SpectraPayload(BaseModel):
    rows: List[List[float]]
    dx: float = 1.0
    origin: float = 0.0
    labels: Optional[List[str]] = None

    def to_matrix(self) -> DataMatrix:
        return DataMatrix(self.rows, dx=self.dx, origin=self.origin, labels=tuple(self.labels or ()))


def parse_weight(text: str) -> WeightSpec:
    ok, message = validate_weight_text(text)
    if not ok:
        raise ValueError(message)
    return WeightSpec.parse(text)


class WeightField(BaseModel):
    weight: str = "off"

    @field_validator("weight")
    @classmethod
    def validate_weight(cls, v):
        parse_weight(v)
        return v


def matrix_payload(X: DataMatrix) -> dict:
    return {"rows": X.values.tolist(), "dx": X.dx, "origin": X.origin, "labels": list(X.labels)}
