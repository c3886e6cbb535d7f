"""Constrained least-squares kernels.

``nnls_solve`` is the Lawson-Hanson active-set method for min 0.5 ||Ax - b||^2
subject to x >= 0. ``bregman_l1`` adds an l1 penalty for under-determined
systems and solves it with accelerated projected shrinkage finished by an
exact active-set solve.
"""
import logging
from typing import List, Optional

import numpy as np

from core.errors import DimensionError, DomainError, IterationLimitError
from core.models import NnlsSolution

logger = logging.getLogger(__name__)

TOL_SCALE = 1e-10
MU_SCALE = 1e-6


def _check_system(A, b):
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or b.ndim != 1:
        raise DimensionError(f"expected a matrix and a vector, got shapes {A.shape} and {b.shape}")
    if A.shape[0] != b.size:
        raise DimensionError(f"matrix has {A.shape[0]} rows but right-hand side has {b.size} entries")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"empty system {A.shape}")
    return A, b


def _free_set_solve(A, b, passive):
    z = np.zeros(A.shape[1])
    z[passive] = np.linalg.lstsq(A[:, passive], b, rcond=None)[0]
    return z


def nnls_solve(A, b, tol: Optional[float] = None) -> NnlsSolution:
    A, b = _check_system(A, b)
    n = A.shape[1]
    scale = float(np.max(np.abs(A.T @ b)))
    if tol is None:
        tol = TOL_SCALE * scale
    elif not tol > 0:
        raise DomainError(f"tolerance must be positive, got {tol}")

    x = np.zeros(n)
    if scale == 0.0:
        return NnlsSolution(x=x, residual_norm=float(np.linalg.norm(b)), iterations=0)

    passive = np.zeros(n, dtype=bool)
    # coordinates whose free-set solve came back nonpositive; cleared when x moves
    excluded = np.zeros(n, dtype=bool)
    max_outer = 10 * n
    iterations = 0

    while True:
        w = A.T @ (b - A @ x)
        candidates = np.flatnonzero(~passive & ~excluded)
        if candidates.size == 0 or w[candidates].max() <= tol:
            break
        iterations += 1
        if iterations > max_outer:
            raise IterationLimitError(f"active-set NNLS did not converge in {max_outer} iterations")

        # argmax returns the lowest index on ties
        j = int(candidates[np.argmax(w[candidates])])
        passive[j] = True
        z = _free_set_solve(A, b, passive)
        if z[j] <= 0:
            passive[j] = False
            excluded[j] = True
            continue

        for _ in range(n + 1):
            blocking = passive & (z <= 0)
            if not blocking.any():
                break
            alpha = np.min(x[blocking] / (x[blocking] - z[blocking]))
            x = x + alpha * (z - x)
            passive &= x > 1e-15 * max(1.0, float(x.max()))
            x[~passive] = 0.0
            z = _free_set_solve(A, b, passive)
        else:
            raise IterationLimitError("active-set NNLS inner loop did not settle")

        x = np.where(passive, z, 0.0)
        excluded[:] = False

    residual = float(np.linalg.norm(A @ x - b))
    return NnlsSolution(x=x, residual_norm=residual, iterations=iterations)


def spectral_norm_sq(A, iterations: int = 500, tol: float = 1e-12) -> float:
    """Largest eigenvalue of A^T A by power iteration."""
    A = np.asarray(A, dtype=float)
    v = np.random.default_rng(0).random(A.shape[1]) + 0.5
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(iterations):
        u = A.T @ (A @ v)
        norm = float(np.linalg.norm(u))
        if norm == 0.0:
            return 0.0
        v = u / norm
        if abs(norm - estimate) <= tol * norm:
            return norm
        estimate = norm
    return estimate


def l1_objective(A, b, mu: float, x) -> float:
    r = b - A @ x
    return 0.5 * float(r @ r) + mu * float(np.abs(x).sum())


def _l1_kkt_gap(A, b, mu, x) -> float:
    # gradient of the smooth part plus mu; zero on the support, nonnegative off it
    g = A.T @ (A @ x - b) + mu
    on = x > 0
    return max(float(np.max(np.abs(g[on]), initial=0.0)), float(-np.min(g[~on], initial=0.0)))


def _restricted_l1(A, b, mu, support) -> Optional[np.ndarray]:
    """Exact solution of the penalized problem with x fixed to zero off ``support``.

    With A_S = R^T R factored, 0.5 ||A_S z - b||^2 + mu 1^T z equals
    0.5 ||R z - q||^2 up to a constant, so the nonnegative minimizer is an NNLS solve.
    """
    As = A[:, support]
    try:
        L = np.linalg.cholesky(As.T @ As)
    except np.linalg.LinAlgError:
        return None
    q = np.linalg.solve(L, As.T @ b - mu)
    x = np.zeros(A.shape[1])
    x[support] = nnls_solve(L.T, q).x
    return x


def _polish_l1(A, b, mu, u, tol) -> Optional[np.ndarray]:
    """Active-set finish from the iterate ``u``; returns x only when it passes the KKT test."""
    m, n = A.shape
    order = np.argsort(-u, kind="stable")
    support = np.sort(order[:min(int(np.count_nonzero(u > 0)), m)])
    for _ in range(n + 1):
        if support.size == 0:
            x = np.zeros(n)
        else:
            x = _restricted_l1(A, b, mu, support)
            if x is None:
                return None
        if _l1_kkt_gap(A, b, mu, x) <= tol:
            return x
        g = A.T @ (A @ x - b) + mu
        g[x > 0] = np.inf
        j = int(np.argmin(g))
        support = np.union1d(np.flatnonzero(x > 0), [j])
        if support.size > m:
            return None
    return None


def bregman_l1(A, b, mu: Optional[float] = None, max_iter: int = 20000, tol: float = 1e-12,
               objective_trace: Optional[List[float]] = None, check_every: int = 50) -> np.ndarray:
    """argmin_{x >= 0} 0.5 ||Ax - b||^2 + mu ||x||_1.

    Monotone FISTA with step d = 1 / ||A||_2^2: the shrinkage step
    z = max(y + d A^T(b - Ay) - d mu, 0) is taken from the momentum point y and
    kept only if it lowers the objective, otherwise momentum restarts. Every
    ``check_every`` iterations the support of the iterate seeds an exact
    active-set solve, which is returned as soon as it satisfies the optimality
    conditions. Iteration otherwise stops once the objective changes by less than
    ``tol`` (relative) over a check window.
    """
    A, b = _check_system(A, b)
    n = A.shape[1]
    scale = float(np.max(np.abs(A.T @ b)))
    if mu is None:
        mu = MU_SCALE * scale
        if mu == 0.0:
            return np.zeros(n)
    elif not mu > 0:
        raise DomainError(f"mu must be positive, got {mu}")

    lipschitz = spectral_norm_sq(A)
    if lipschitz == 0.0:
        raise DomainError("l1 recovery needs a nonzero matrix")
    step = 1.0 / lipschitz
    kkt_tol = 1e-9 * max(scale, mu)

    def record(value):
        if objective_trace is not None:
            objective_trace.append(value)

    x = np.zeros(n)
    x_prev = x
    y = x
    t = 1.0
    current = l1_objective(A, b, mu, x)
    window_start = current
    for iteration in range(1, max_iter + 1):
        z = np.maximum(y + step * (A.T @ (b - A @ y)) - step * mu, 0.0)
        candidate = l1_objective(A, b, mu, z)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        if candidate <= current:
            x_prev, x, current = x, z, candidate
            y = x + ((t - 1.0) / t_next) * (x - x_prev)
            t = t_next
        else:
            # restart from the best point without momentum
            x_prev, y, t = x, x, 1.0
        record(current)

        if iteration % check_every == 0:
            polished = _polish_l1(A, b, mu, x, kkt_tol)
            if polished is not None:
                value = l1_objective(A, b, mu, polished)
                if value <= current:
                    record(value)
                    return polished
            if abs(window_start - current) <= tol * max(abs(current), 1e-300):
                return x
            window_start = current
    logger.warning("l1 recovery stopped at max_iter=%d before reaching tol=%g", max_iter, tol)
    return x
