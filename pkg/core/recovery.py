import logging
from typing import List, Literal, Optional

import numpy as np

from core.errors import DimensionError, RankError
from core.models import DataMatrix, MixingMatrix, Spectrum
from core.nnls import bregman_l1, nnls_solve
from utils.parallel import parallel_map

logger = logging.getLogger(__name__)

RecoveryMode = Literal["auto", "nnls", "l1", "pinv"]


def resolve_mode(mode: RecoveryMode, m: int, n: int) -> str:
    if mode == "auto":
        return "nnls" if m >= n else "l1"
    return mode


def recover_sources(X: DataMatrix, A: MixingMatrix, mode: RecoveryMode = "auto",
                    mu: Optional[float] = None, n_jobs: Optional[int] = None) -> List[Spectrum]:
    """Solve X = A S for S column by column.

    ``nnls`` and ``l1`` return nonnegative sources. ``pinv`` is the plain
    pseudoinverse, kept for diagnostics, and may return negative samples.
    Pass the unsharpened mixtures to get physical spectra back.
    """
    if A.m != X.m:
        raise DimensionError(f"mixing matrix has {A.m} rows but data has {X.m} mixtures")
    mode = resolve_mode(mode, A.m, A.n)
    logger.debug("recovering %d sources from %d mixtures with %s", A.n, X.m, mode)

    if mode == "pinv":
        S = np.linalg.pinv(A.values) @ X.values
    else:
        if mode == "nnls":
            if A.n > A.m:
                raise RankError(f"NNLS recovery needs m >= n, got m={A.m}, n={A.n}; use l1")
            A.check_rank()

        def solve(b):
            if mode == "nnls":
                return nnls_solve(A.values, b).x
            return bregman_l1(A.values, b, mu=mu)

        columns = parallel_map(solve, list(X.values.T), n_jobs=n_jobs)
        S = np.column_stack(columns)

    return [Spectrum(row, dx=X.dx, origin=X.origin, label=f"s{i}") for i, row in enumerate(S)]
