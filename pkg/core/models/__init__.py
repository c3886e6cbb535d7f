from core.models.lineshape import LineshapeFit
from core.models.matrices import (ColumnScores, DataMatrix, MixingMatrix, NnlsSolution,
                                  NormalizedColumns)
from core.models.options import UnmixOptions, WeightSpec
from core.models.peak import LorentzPeak, SharpenWeight
from core.models.report import MetricBundle, SeparationReport
from core.models.scenario import GridSpec, ScenarioConfig, SourceSpec
from core.models.spectrum import PeakEstimate, Spectrum

__all__ = [
    "ColumnScores", "DataMatrix", "GridSpec", "LineshapeFit", "LorentzPeak", "MetricBundle", "MixingMatrix",
    "NnlsSolution", "NormalizedColumns", "PeakEstimate", "ScenarioConfig", "SeparationReport",
    "SharpenWeight", "SourceSpec", "Spectrum", "UnmixOptions", "WeightSpec",
]
