"""
Bounded process pool for per-ell work.

Results always come back in the order of the inputs, whatever order the
workers finish in, so reports are identical for every --jobs value.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def map_ordered(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """
    Apply func to every item, in parallel when jobs > 1

    Args:
        func: picklable top-level callable
        items: work items, each picklable
        jobs: worker count; 1 runs inline

    Returns:
        List: results in input order
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    results: List = [None] * len(items)
    workers = min(jobs, len(items))
    logger.debug(f"dispatching {len(items)} items to {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futures = {ex.submit(func, item): k for k, item in enumerate(items)}
        for ft in as_completed(futures):
            results[futures[ft]] = ft.result()
    return results
