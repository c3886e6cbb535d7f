from pathlib import Path

import numpy as np
import pytest

from core.models import DataMatrix, MixingMatrix
from store.config import get_settings
from store.dals.spectra_dal import SpectraDAL

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    """Single-threaded runs writing into a throwaway data directory."""
    monkeypatch.setenv("PEAKSHARP_THREADS", "1")
    monkeypatch.setenv("PEAKSHARP_DATA_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("PEAKSHARP_LOG_LEVEL", "WARNING")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture
def load_scenario():
    dal = SpectraDAL(SCENARIO_DIR)

    def load(name: str, **overrides):
        return dal.load_scenario(f"{name}.yaml", overrides or None)

    return load


@pytest.fixture
def toy_mixing() -> MixingMatrix:
    return MixingMatrix([[0.6, 0.8], [0.8, 0.6]])


@pytest.fixture
def toy_mixtures(toy_mixing) -> DataMatrix:
    """X = A S where columns 0 and 1 are pure sources and the rest are mixtures."""
    S = np.array([[1.0, 0.0, 0.5, 0.3, 0.2],
                  [0.0, 1.0, 0.5, 0.7, 0.1]])
    return DataMatrix(toy_mixing.values @ S)
