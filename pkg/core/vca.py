"""Mixing-matrix estimation by convex-cone vertex identification.

Columns of X = AS live in the cone spanned by the columns of A. After scaling
every column onto the simplex, a column that is a nonnegative combination of
the others scores 0; the n columns with the largest residual scores are the
estimated cone edges.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from core.errors import DomainError, EmptyDataError, IterationLimitError, SelectionError
from core.models import ColumnScores, DataMatrix, MixingMatrix, NormalizedColumns, UnmixOptions
from core.nnls import nnls_solve
from core.signal import estimate_noise_sigma, sharpen_matrix
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)


# a noise floor never removes columns above this fraction of the largest norm
NOISE_FLOOR_CAP = 0.5


def normalize_columns(X: DataMatrix, drop_tol: float = 1e-6,
                      noise_floor: Optional[float] = None) -> NormalizedColumns:
    """Scale columns to unit l1 norm, dropping near-zero columns.

    A column is kept when its norm exceeds drop_tol * max norm and, with
    ``noise_floor`` set, also noise_floor times the l1 norm of a column of pure
    noise, i.e. the sum of the per-row noise levels.
    """
    norms = np.abs(X.values).sum(axis=0)
    top = float(norms.max())
    if top <= 0:
        raise EmptyDataError("every column of the data matrix is zero")
    threshold = drop_tol * top
    if noise_floor:
        noise_l1 = noise_floor * float(estimate_noise_sigma(X.values).sum())
        threshold = max(threshold, min(noise_l1, NOISE_FLOOR_CAP * top))
    kept = np.flatnonzero(norms > threshold)
    if kept.size == 0:
        raise EmptyDataError(f"no column survives drop_tol={drop_tol}")
    logger.debug("kept %d of %d columns above %.3g", kept.size, X.p, threshold)
    return NormalizedColumns(columns=X.values[:, kept] / norms[kept], kept_indices=kept)


def _column_score(columns: np.ndarray, kept: np.ndarray, k: int, collinear_tol: Optional[float]) -> float:
    target = columns[:, k]
    others = np.ones(columns.shape[1], dtype=bool)
    others[k] = False
    if collinear_tol is not None:
        others &= np.abs(columns - target[:, None]).sum(axis=0) > collinear_tol
    if not others.any():
        return 0.5 * float(target @ target)
    try:
        solution = nnls_solve(columns[:, others], target)
    except IterationLimitError as e:
        raise IterationLimitError(f"scoring column {kept[k]}: {e}", column=int(kept[k])) from e
    return 0.5 * solution.residual_norm ** 2


def score_columns(Xn: NormalizedColumns, collinear_tol: Optional[float] = None,
                  n_jobs: Optional[int] = None) -> ColumnScores:
    """Residual of representing each kept column by the others with nonnegative weights.

    With ``collinear_tol`` set, columns within that l1 distance of the scored
    column are left out of its basis, so repeated copies of one vertex do not
    explain each other away.
    """
    columns = Xn.columns
    scores = parallel_map(lambda k: _column_score(columns, Xn.kept_indices, k, collinear_tol),
                          range(columns.shape[1]), n_jobs=n_jobs)
    return ColumnScores(kept_indices=Xn.kept_indices, scores=np.asarray(scores, dtype=float))


def _angle_deg(a: np.ndarray, b: np.ndarray) -> float:
    cos = float(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))


def select_vertices(Xn: NormalizedColumns, scores: ColumnScores, n: int,
                    min_angle_deg: float = 2.0) -> MixingMatrix:
    if n < 2:
        raise DomainError(f"at least two sources are required, got n={n}")
    if len(scores) <= n:
        raise SelectionError(f"need more than {n} candidate columns, only {len(scores)} kept",
                             found=len(scores))

    chosen = []
    for position in np.argsort(-scores.scores, kind="stable"):
        candidate = Xn.columns[:, position]
        if all(_angle_deg(candidate, Xn.columns[:, c]) >= min_angle_deg for c in chosen):
            chosen.append(int(position))
            if len(chosen) == n:
                break

    if len(chosen) < n:
        raise SelectionError(
            f"only {len(chosen)} columns are at least {min_angle_deg:g} degrees apart, {n} requested",
            found=len(chosen))
    return MixingMatrix.from_columns(Xn.columns[:, chosen], column_indices=Xn.kept_indices[chosen])


def estimate_mixing(X: DataMatrix, n: int, options: Optional[UnmixOptions] = None,
                    weight_k: float = 0.0) -> Tuple[MixingMatrix, ColumnScores]:
    """NN estimator; with ``weight_k > 0`` the rows are sharpened first (NNP)."""
    options = options or UnmixOptions()
    if n < 2:
        raise DomainError(f"at least two sources are required, got n={n}")

    if weight_k > 0:
        X, _ = sharpen_matrix(X, weight_k, clamp_negative=options.clamp_negative, n_jobs=options.n_jobs)
    if options.clamp_negative and X.negative_count():
        logger.warning("clamping %d negative entries before estimation", X.negative_count())
        X = X.clamped()
    X.require_separable()

    normalized = normalize_columns(X, options.drop_tol, options.noise_floor)
    scores = score_columns(normalized, collinear_tol=options.collinear_tol, n_jobs=options.n_jobs)
    mixing = select_vertices(normalized, scores, n, options.min_angle_deg)
    logger.info("selected columns %s", mixing.column_indices.tolist())
    return mixing, scores
