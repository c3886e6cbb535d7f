"""Separation quality: Comon's index, cosine similarity and column matching."""
import itertools
import math
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from core.errors import DataError, DimensionError, SingularMatrixError
from core.models import MetricBundle, MixingMatrix, Spectrum

CONDITION_LIMIT = 1e12
EXHAUSTIVE_LIMIT = 8


def _unit_columns(M: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(M, axis=0)
    if np.any(norms == 0):
        raise DataError("cannot normalize a zero column")
    return M / norms


def comon_index(A, Abar) -> float:
    """Distance between two square mixing matrices up to column scaling and order.

    Columns are scaled to unit l2 norm, then with D = A^-1 Abar the index sums,
    over rows and columns, (sum |d| - 1)^2 and |sum d^2 - 1|.
    """
    A = np.asarray(A, dtype=float)
    Abar = np.asarray(Abar, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != Abar.shape:
        raise DimensionError(f"comon index needs two square matrices of equal size, got {A.shape} and {Abar.shape}")
    A = _unit_columns(A)
    Abar = _unit_columns(Abar)
    if np.linalg.cond(A) > CONDITION_LIMIT:
        raise SingularMatrixError("reference mixing matrix is singular or too ill-conditioned")

    D = np.abs(np.linalg.solve(A, Abar))
    D2 = D ** 2
    rows = np.sum((D.sum(axis=1) - 1.0) ** 2) + np.sum(np.abs(D2.sum(axis=1) - 1.0))
    cols = np.sum((D.sum(axis=0) - 1.0) ** 2) + np.sum(np.abs(D2.sum(axis=0) - 1.0))
    return float(rows + cols)


def cosine_similarity(s1, s2) -> float:
    a = np.asarray(s1.values if isinstance(s1, Spectrum) else s1, dtype=float)
    b = np.asarray(s2.values if isinstance(s2, Spectrum) else s2, dtype=float)
    if a.shape != b.shape:
        raise DimensionError(f"cannot compare signals of shapes {a.shape} and {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise DataError("cosine similarity is undefined for a zero signal")
    return float(a @ b / (na * nb))


def match_columns(Atrue, Ahat) -> np.ndarray:
    """Permutation ``perm`` maximizing sum_j cos(Atrue[:, j], Ahat[:, perm[j]])."""
    Atrue = np.asarray(Atrue, dtype=float)
    Ahat = np.asarray(Ahat, dtype=float)
    if Atrue.shape != Ahat.shape:
        raise DimensionError(f"cannot match {Atrue.shape} against {Ahat.shape}")
    cos = _unit_columns(Atrue).T @ _unit_columns(Ahat)
    n = cos.shape[0]
    if n <= EXHAUSTIVE_LIMIT:
        best = max(itertools.permutations(range(n)),
                   key=lambda perm: sum(cos[j, perm[j]] for j in range(n)))
        return np.asarray(best, dtype=int)
    _, perm = linear_sum_assignment(cos, maximize=True)
    return perm.astype(int)


def metric_bundle(A_true, A_est, S_true: Optional[list] = None,
                  S_est: Optional[list] = None) -> MetricBundle:
    """Comon index plus per-source cosines after matching estimated columns to the truth."""
    true_values = A_true.values if isinstance(A_true, MixingMatrix) else np.asarray(A_true, dtype=float)
    est_values = A_est.values if isinstance(A_est, MixingMatrix) else np.asarray(A_est, dtype=float)
    perm = match_columns(true_values, est_values)
    square = true_values.shape[0] == true_values.shape[1]
    index = comon_index(true_values, est_values) if square else math.nan
    if S_true is not None and S_est is not None:
        if len(S_true) != len(perm) or len(S_est) != len(perm):
            raise DimensionError(f"expected {len(perm)} sources on both sides")
        cosines = np.array([cosine_similarity(S_true[j], S_est[perm[j]]) for j in range(len(perm))])
    else:
        cosines = np.array([cosine_similarity(true_values[:, j], est_values[:, perm[j]])
                            for j in range(len(perm))])
    return MetricBundle(comon_index=index, per_source_cosine=cosines, column_assignment=perm)
