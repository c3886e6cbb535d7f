from typing import Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

from store.config import get_settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_n_jobs(n_jobs: Optional[int] = None) -> int:
    if n_jobs is None:
        return get_settings().n_jobs
    return n_jobs


def parallel_map(func: Callable[[T], R], items: Iterable[T], n_jobs: Optional[int] = None) -> List[R]:
    """Map ``func`` over ``items`` on a thread pool; results keep input order."""
    items = list(items)
    n_jobs = resolve_n_jobs(n_jobs)
    if n_jobs == 1 or len(items) < 2:
        return [func(item) for item in items]
    return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(func)(item) for item in items)
