"""Order-preserving process-pool map used by bootstrap loops and sweeps."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

import structlog

logger = structlog.get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def available_cores() -> int:
    return os.cpu_count() or 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T], n_jobs: int | None = 1) -> list[R]:
    """Apply ``fn`` to every item, returning results in input order.

    Args:
        fn: Picklable callable (module-level function or ``functools.partial``)
        items: Work items
        n_jobs: Worker processes; ``1`` runs inline, ``None`` or ``<= 0`` uses all cores

    Returns:
        ``[fn(item) for item in items]``, independent of ``n_jobs``
    """
    work = list(items)
    if n_jobs is None or n_jobs <= 0:
        n_jobs = available_cores()
    n_jobs = min(n_jobs, len(work))
    if n_jobs <= 1:
        return [fn(item) for item in work]

    logger.debug("parallel_map_started", n_items=len(work), n_jobs=n_jobs)
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        results = list(pool.map(fn, work))
    logger.debug("parallel_map_complete", n_items=len(work))
    return results
