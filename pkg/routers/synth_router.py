from typing import Optional

from fastapi import APIRouter

from core.models import DataMatrix, ScenarioConfig
from core.synth import generate
from routers.errors import http_error
from routers.schemas import matrix_payload

router = APIRouter(prefix="/synth", tags=["Synthesis"])


@router.post("")
async def synthesize(scenario: ScenarioConfig, snr_db: Optional[float] = None, seed: Optional[int] = None):
    """Generate sources, ground-truth mixing and mixtures for a scenario"""
    try:
        run = generate(scenario, snr_db=snr_db, seed=seed)
        return {
            "name": scenario.name,
            "sources": matrix_payload(DataMatrix.from_spectra(run.sources)),
            "mixtures": matrix_payload(run.mixtures),
            "mixing": run.mixing.values.tolist(),
            "windows": [list(window) for window in run.windows],
        }
    except Exception as e:
        raise http_error(e, "synthesizing the scenario")
