from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.errors import DataError, DimensionError, DomainError, RankError, SizeError
from core.models.spectrum import Spectrum

RANK_TOL = 1e-8


@dataclass(frozen=True)
class NnlsSolution:
    x: np.ndarray
    residual_norm: float
    iterations: int


@dataclass(frozen=True)
class DataMatrix:
    """Mixture matrix X (m x p): rows are spectra, columns are points in m-space."""

    values: np.ndarray
    dx: float = 1.0
    origin: float = 0.0
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DimensionError(f"data matrix must be two-dimensional, got shape {values.shape}")
        m, p = values.shape
        if m < 1 or p < 3:
            raise SizeError(f"data matrix needs at least one row and three samples, got {m}x{p}")
        if not np.all(np.isfinite(values)):
            raise DataError("data matrix contains non-finite values")
        if not self.dx > 0:
            raise DomainError(f"dx must be positive, got {self.dx}")
        labels = tuple(self.labels) or tuple(f"x{i}" for i in range(m))
        if len(labels) != m:
            raise DimensionError(f"{len(labels)} labels for {m} rows")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def rows(self) -> list[Spectrum]:
        return [Spectrum(row, dx=self.dx, origin=self.origin, label=label)
                for row, label in zip(self.values, self.labels)]

    @classmethod
    def from_spectra(cls, spectra: list[Spectrum]) -> "DataMatrix":
        if not spectra:
            raise SizeError("no spectra given")
        lengths = {len(s) for s in spectra}
        if len(lengths) != 1:
            raise DimensionError(f"spectra have different lengths: {sorted(lengths)}")
        first = spectra[0]
        return cls(np.vstack([s.values for s in spectra]), dx=first.dx, origin=first.origin,
                   labels=tuple(s.label or f"x{i}" for i, s in enumerate(spectra)))

    def with_values(self, values: np.ndarray) -> "DataMatrix":
        return DataMatrix(values, dx=self.dx, origin=self.origin, labels=self.labels)

    def negative_count(self) -> int:
        return int(np.count_nonzero(self.values < 0))

    def clamped(self) -> "DataMatrix":
        return self.with_values(np.maximum(self.values, 0.0))

    def require_separable(self) -> None:
        """Shape constraints of the cone estimator: m >= 2, p > m, entries >= 0."""
        if self.m < 2:
            raise SizeError(f"need at least two mixtures, got {self.m}")
        if self.p <= self.m:
            raise SizeError(f"need more samples than mixtures, got p={self.p}, m={self.m}")
        if self.negative_count():
            raise DataError(f"data matrix has {self.negative_count()} negative entries; clamp first")


@dataclass(frozen=True)
class NormalizedColumns:
    columns: np.ndarray
    kept_indices: np.ndarray


@dataclass(frozen=True)
class ColumnScores:
    kept_indices: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        kept = np.asarray(self.kept_indices, dtype=int)
        scores = np.asarray(self.scores, dtype=float)
        if kept.shape != scores.shape:
            raise DimensionError(f"{kept.size} indices for {scores.size} scores")
        if kept.size > 1 and np.any(np.diff(kept) <= 0):
            raise DataError("kept indices must be strictly increasing")
        object.__setattr__(self, "kept_indices", kept)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return self.scores.size


@dataclass(frozen=True)
class MixingMatrix:
    """m x n nonnegative mixing coefficients.

    Estimated matrices are built with ``from_columns`` (unit l1 columns and
    provenance indices); ground truth keeps its raw entries.
    """

    values: np.ndarray
    column_indices: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if values.ndim != 2:
            raise DimensionError(f"mixing matrix must be two-dimensional, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataError("mixing matrix contains non-finite values")
        if np.any(values < 0):
            raise DataError("mixing matrix entries must be nonnegative")
        object.__setattr__(self, "values", values)
        if self.column_indices is not None:
            indices = np.asarray(self.column_indices, dtype=int)
            if indices.size != values.shape[1]:
                raise DimensionError(f"{indices.size} provenance indices for {values.shape[1]} columns")
            object.__setattr__(self, "column_indices", indices)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_columns(cls, columns: np.ndarray, column_indices=None) -> "MixingMatrix":
        columns = np.asarray(columns, dtype=float)
        sums = columns.sum(axis=0)
        if np.any(sums <= 0):
            raise DataError("cannot l1-normalize a zero column")
        mixing = cls(columns / sums, column_indices)
        mixing.check_rank()
        return mixing

    def normalized(self) -> "MixingMatrix":
        return MixingMatrix(self.values / self.values.sum(axis=0), self.column_indices)

    def permuted(self, order) -> "MixingMatrix":
        order = np.asarray(order, dtype=int)
        indices = None if self.column_indices is None else self.column_indices[order]
        return MixingMatrix(self.values[:, order], indices)

    def check_rank(self, tol: float = RANK_TOL) -> None:
        if self.n > self.m:
            return
        rank = np.linalg.matrix_rank(self.values, tol=tol)
        if rank < self.n:
            raise RankError(f"mixing matrix columns are linearly dependent (rank {rank} < {self.n})")
