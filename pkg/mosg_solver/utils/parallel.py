"""
Order-preserving process pool.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Optional

logger = logging.getLogger(__name__)


class WorkerPool:
    """
    Map pure functions over items, in-process or across worker processes.

    Results always come back in input order, so the worker count never
    changes an outcome.
    """

    def __init__(self, workers: int = 1):
        self.workers = max(1, int(workers))
        self._executor: Optional[ProcessPoolExecutor] = None

    def __enter__(self) -> "WorkerPool":
        if self.workers > 1:
            logger.debug(f"Starting {self.workers} worker processes")
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc: Any) -> None:
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def map(self, fn: Callable[..., Any], *iterables: Any) -> List[Any]:
        if self._executor is None:
            return list(map(fn, *iterables))
        columns = [list(it) for it in iterables]
        size = len(columns[0]) if columns else 0
        chunksize = max(1, size // (self.workers * 4))
        return list(self._executor.map(fn, *columns, chunksize=chunksize))
