import io
import json
import logging
import re
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
import yaml
from pydantic import ValidationError

from core.errors import ConfigError, DataError, NotFoundError
from core.models import (ColumnScores, DataMatrix, MixingMatrix, ScenarioConfig, SeparationReport,
                         Spectrum)

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
_META_LINE = re.compile(r"^#\s*(.*)$")

PathLike = Union[str, Path]


def _plain(value):
    """Convert numpy scalars and arrays into YAML/JSON friendly Python values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def format_validation_error(e: ValidationError) -> str:
    return "; ".join(f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}"
                     for err in e.errors())


class SpectraDAL:
    """File access for run artifacts under one output directory.

    CSV files hold one signal per row: a string label followed by the samples.
    The first line is a comment carrying axis metadata, ``# origin=<v> dx=<v>``
    for spectra and ``# kind=matrix`` for coefficient tables.
    """

    def __init__(self, root: PathLike = "."):
        self.root = Path(root)

    def path(self, name: PathLike) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self.root / path

    def ensure_root(self) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        return self.root

    # CSV tables

    def _write_table(self, name: PathLike, values: np.ndarray, labels: Sequence[str], header: str) -> Path:
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(np.atleast_2d(values), index=list(labels))
        with open(path, "w", newline="") as handle:
            handle.write(f"# {header}\n")
            frame.to_csv(handle, header=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.debug("wrote %s (%d x %d)", path, *frame.shape)
        return path

    def _read_table(self, name: PathLike):
        path = self.path(name)
        if not path.is_file():
            raise NotFoundError(f"file not found: {path}")
        return self._parse_table(path.read_text(), path)

    @staticmethod
    def _parse_table(text: str, path):
        first = text.splitlines()[0] if text else ""
        meta = {}
        match = _META_LINE.match(first)
        if match:
            for token in match.group(1).split():
                key, _, value = token.partition("=")
                meta[key] = value
        try:
            frame = pd.read_csv(io.StringIO(text), comment="#", header=None, index_col=0,
                                float_precision="round_trip")
        except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise DataError(f"cannot parse {path}: {e}") from e
        try:
            values = frame.to_numpy(dtype=float)
        except ValueError as e:
            raise DataError(f"{path} contains non-numeric samples: {e}") from e
        if not np.all(np.isfinite(values)):
            raise DataError(f"{path} contains missing or non-numeric samples")
        return [str(label) for label in frame.index], values, meta

    def write_spectra(self, name: PathLike, data: Union[DataMatrix, Sequence[Spectrum]]) -> Path:
        if not isinstance(data, DataMatrix):
            data = DataMatrix.from_spectra(list(data))
        header = f"origin={float(data.origin)!r} dx={float(data.dx)!r}"
        return self._write_table(name, data.values, data.labels, header)

    def read_spectra(self, name: PathLike) -> DataMatrix:
        return self._to_matrix(*self._read_table(name), self.path(name))

    def parse_spectra(self, text: str, source: str = "upload") -> DataMatrix:
        return self._to_matrix(*self._parse_table(text, source), source)

    @staticmethod
    def _to_matrix(labels, values, meta, source) -> DataMatrix:
        try:
            origin = float(meta.get("origin", 0.0))
            dx = float(meta.get("dx", 1.0))
        except ValueError as e:
            raise DataError(f"bad axis metadata in {source}: {e}") from e
        return DataMatrix(values, dx=dx, origin=origin, labels=tuple(labels))

    def write_mixing(self, name: PathLike, mixing: MixingMatrix) -> Path:
        labels = [f"x{i}" for i in range(mixing.m)]
        return self._write_table(name, mixing.values, labels, "kind=matrix")

    def read_mixing(self, name: PathLike) -> MixingMatrix:
        _, values, _ = self._read_table(name)
        return MixingMatrix(values)

    def write_scores(self, name: PathLike, scores: ColumnScores) -> Path:
        table = np.vstack([scores.kept_indices.astype(float), scores.scores])
        return self._write_table(name, table, ["index", "score"], "kind=matrix")

    def read_scores(self, name: PathLike) -> ColumnScores:
        labels, values, _ = self._read_table(name)
        if labels != ["index", "score"]:
            raise DataError(f"{self.path(name)} is not a scores table")
        return ColumnScores(kept_indices=values[0].astype(int), scores=values[1])

    # structured records

    def write_meta(self, name: PathLike, record: dict) -> Path:
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as handle:
            yaml.safe_dump(_plain(record), handle, sort_keys=False)
        return path

    def read_meta(self, name: PathLike) -> dict:
        path = self.path(name)
        if not path.is_file():
            raise NotFoundError(f"file not found: {path}")
        with open(path) as handle:
            return yaml.safe_load(handle) or {}

    def write_json(self, name: PathLike, record: dict) -> Path:
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(_plain(record), indent=2) + "\n")
        return path

    def read_json(self, name: PathLike) -> dict:
        path = self.path(name)
        if not path.is_file():
            raise NotFoundError(f"file not found: {path}")
        return json.loads(path.read_text())

    def write_frame(self, name: PathLike, frame: pd.DataFrame) -> Path:
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    # run bundles

    def write_synthetic(self, run, config: ScenarioConfig) -> dict:
        """sources.csv, mixtures.csv, mixing_true.csv and scenario.meta for a synthetic run."""
        paths = {
            "sources": self.write_spectra("sources.csv", run.sources),
            "mixtures": self.write_spectra("mixtures.csv", run.mixtures),
            "mixing_true": self.write_mixing("mixing_true.csv", run.mixing),
        }
        record = config.model_dump(mode="json")
        record["windows"] = [list(window) for window in run.windows]
        paths["meta"] = self.write_meta("scenario.meta", record)
        return paths

    def write_separation(self, report: SeparationReport) -> dict:
        """mixing_est.csv, sources_est.csv, scores.csv and report.meta for a separation."""
        record = report.to_dict()
        for bulky in ("mixing", "sources", "kept_indices", "scores"):
            record.pop(bulky)
        return {
            "mixing_est": self.write_mixing("mixing_est.csv", report.estimated_a),
            "sources_est": self.write_spectra("sources_est.csv", report.estimated_s),
            "scores": self.write_scores("scores.csv", report.scores),
            "meta": self.write_meta("report.meta", record),
        }

    def load_scenario(self, name: PathLike, overrides: Optional[dict] = None) -> ScenarioConfig:
        path = self.path(name)
        if not path.is_file():
            raise ConfigError(f"scenario file not found: {path}")
        try:
            with open(path) as handle:
                raw = yaml.safe_load(handle)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: invalid YAML: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: expected a mapping at the top level")
        raw.update(overrides or {})
        try:
            return ScenarioConfig.model_validate(raw)
        except ValidationError as e:
            raise ConfigError(f"{path}: {format_validation_error(e)}") from e
