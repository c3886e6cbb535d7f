from typing import List, Optional

import numpy as np
from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, field_validator

from core import lorentzian
from core.models import LorentzPeak
from routers.errors import http_error

router = APIRouter(prefix="/lorentzian", tags=["Lorentzian"])


class EvaluateRequest(BaseModel):
    peak: LorentzPeak
    xs: List[float]
    k: float = 0.0

    @field_validator("xs")
    @classmethod
    def validate_xs(cls, v):
        if not v:
            raise ValueError("xs must contain at least one abscissa")
        return v

    @field_validator("k")
    @classmethod
    def validate_k(cls, v):
        if v < 0:
            raise ValueError("k must be nonnegative")
        return v


@router.get("/bounds")
async def weight_bounds(hwhm: float, k: Optional[float] = None):
    """Largest nonnegativity-preserving weight for a half-width, and the gain at k"""
    try:
        k_max = lorentzian.max_safe_weight(hwhm)
        k = k_max if k is None else k
        return {
            "hwhm": hwhm,
            "k": k,
            "k_max": k_max,
            "sharpening_factor": lorentzian.sharpening_factor(hwhm, k),
            "safe": 0 < k <= k_max,
        }
    except Exception as e:
        raise http_error(e, "computing weight bounds")


@router.post("/evaluate")
async def evaluate_peak(request: EvaluateRequest):
    try:
        xs = np.asarray(request.xs, dtype=float)
        return {
            "xs": request.xs,
            "values": lorentzian.evaluate(request.peak, xs).tolist(),
            "second_derivative": lorentzian.second_derivative(request.peak, xs).tolist(),
            "sharpened": lorentzian.sharpened(request.peak, request.k, xs).tolist(),
            "sharpening_factor": lorentzian.sharpening_factor(request.peak.hwhm, request.k),
        }
    except HTTPException:
        raise
    except Exception as e:
        raise http_error(e, "evaluating the peak")
