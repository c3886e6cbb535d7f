from typing import Literal

from fastapi import APIRouter, Depends, File, Form, UploadFile

from core.pipeline import sharpen_mixtures
from dependencies import get_spectra_dal
from routers.errors import http_error
from routers.schemas import SpectraPayload, WeightField, matrix_payload, parse_weight
from store.dals.spectra_dal import SpectraDAL

router = APIRouter(prefix="/sharpen", tags=["Sharpening"])


class SharpenRequest(SpectraPayload, WeightField):
    prominence: float = 0.5
    clamp_negative: bool = True
    sharpen_method: Literal["difference", "model"] = "difference"


@router.post("")
async def sharpen_rows(request: SharpenRequest):
    """Apply s - k s'' to every row; k resolved from the weight spec"""
    try:
        sharpened, record = sharpen_mixtures(request.to_matrix(), parse_weight(request.weight),
                                             request.prominence, request.clamp_negative,
                                             method=request.sharpen_method)
        return {**matrix_payload(sharpened), "meta": record}
    except Exception as e:
        raise http_error(e, "sharpening")


@router.post("/upload")
async def sharpen_upload(file: UploadFile = File(...), weight: str = Form("auto"),
                         prominence: float = Form(0.5), clamp_negative: bool = Form(True),
                         dal: SpectraDAL = Depends(get_spectra_dal)):
    """Same as POST /sharpen for a mixtures CSV upload"""
    try:
        text = (await file.read()).decode("utf-8")
        X = dal.parse_spectra(text, source=file.filename or "upload")
        sharpened, record = sharpen_mixtures(X, parse_weight(weight), prominence, clamp_negative)
        return {**matrix_payload(sharpened), "meta": record}
    except Exception as e:
        raise http_error(e, "sharpening the upload")
