from typing import List, Optional

import numpy as np
from fastapi import APIRouter
from pydantic import BaseModel

from core.metrics import comon_index, metric_bundle
from core.models import MixingMatrix
from routers.errors import http_error

router = APIRouter(prefix="/eval", tags=["Evaluation"])


class ComonRequest(BaseModel):
    a: List[List[float]]
    abar: List[List[float]]


class ReportRequest(BaseModel):
    truth_mixing: List[List[float]]
    estimated_mixing: List[List[float]]
    truth_sources: Optional[List[List[float]]] = None
    estimated_sources: Optional[List[List[float]]] = None


@router.post("/comon")
async def comon(request: ComonRequest):
    try:
        return {"comon_index": comon_index(np.asarray(request.a), np.asarray(request.abar))}
    except Exception as e:
        raise http_error(e, "computing the Comon index")


@router.post("/report")
async def report(request: ReportRequest):
    """Comon index and per-source cosines after matching estimated columns to the truth"""
    try:
        bundle = metric_bundle(MixingMatrix(request.truth_mixing), MixingMatrix(request.estimated_mixing),
                               request.truth_sources, request.estimated_sources)
        return bundle.to_dict()
    except Exception as e:
        raise http_error(e, "evaluating the estimate")
