from typing import List, Literal, Optional

from fastapi import APIRouter, Depends
from pydantic import field_validator

from core.models import MixingMatrix, UnmixOptions
from core.pipeline import separate
from dependencies import get_spectra_dal
from routers.errors import http_error
from routers.schemas import SpectraPayload, WeightField, parse_weight
from store.dals.spectra_dal import SpectraDAL
from utils.validation import validate_source_count

router = APIRouter(prefix="/unmix", tags=["Unmixing"])


class UnmixRequest(SpectraPayload, WeightField):
    n: int
    mode: Literal["nn", "nnp"] = "nn"
    drop_tol: float = 1e-6
    min_angle_deg: float = 2.0
    prominence: float = 0.5
    recovery_mode: Literal["auto", "nnls", "l1", "pinv"] = "auto"
    mu: Optional[float] = None
    noise_floor: Optional[float] = 5.0
    sharpen_method: Literal["difference", "model"] = "difference"
    truth: Optional[List[List[float]]] = None
    run_name: Optional[str] = None

    @field_validator("n")
    @classmethod
    def validate_n(cls, v):
        ok, message = validate_source_count(v)
        if not ok:
            raise ValueError(message)
        return v

    @field_validator("run_name")
    @classmethod
    def validate_run_name(cls, v):
        if v is not None and (not v or "/" in v or "\\" in v or v.startswith(".")):
            raise ValueError("run_name must be a plain directory name")
        return v

    def options(self) -> UnmixOptions:
        return UnmixOptions(method=self.mode, weight=parse_weight(self.weight), drop_tol=self.drop_tol,
                            min_angle_deg=self.min_angle_deg, prominence=self.prominence,
                            recovery_mode=self.recovery_mode, mu=self.mu, noise_floor=self.noise_floor,
                            sharpen_method=self.sharpen_method)


@router.post("")
async def unmix(request: UnmixRequest, dal: SpectraDAL = Depends(get_spectra_dal)):
    """NN or NNP separation; sources are always recovered from the unsharpened rows"""
    try:
        truth = MixingMatrix(request.truth) if request.truth is not None else None
        report = separate(request.to_matrix(), request.n, request.options(), truth=truth)
        result = report.to_dict()
        if request.run_name:
            run_dal = SpectraDAL(dal.root / request.run_name)
            paths = run_dal.write_separation(report)
            result["files"] = {key: str(path) for key, path in paths.items()}
        return result
    except Exception as e:
        raise http_error(e, "unmixing")
