"""Fan per-seed work out to a process pool, keeping input order."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "SKOMAP_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """--threads value, else $SKOMAP_THREADS, else 1."""
    if requested is not None:
        return max(1, int(requested))
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning("ignoring %s=%r: not an integer", THREADS_ENV, raw)
    return 1


def run_tasks(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """[fn(x) for x in items], in parallel when threads > 1.

    Results come back in input order, so output does not depend on
    scheduling. ``fn`` must be a picklable module-level callable.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    workers = min(threads, len(items))
    logger.info("running %d tasks on %d workers", len(items), workers)
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
