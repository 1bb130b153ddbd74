# app/engine.py
# Worker pool shared by the parallel stages (verdict matrix, oracle subtrees).
# Results always come back in input order, so worker count never changes an artifact.
from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from app.errors import BudgetExceeded

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "RAMSEY_CUBE_THREADS"


def worker_cap(requested: Optional[int] = None) -> int:
    """Number of workers: the request, capped by RAMSEY_CUBE_THREADS when set."""
    workers = requested if requested is not None else 1
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {env!r}")
        if cap >= 1:
            workers = min(workers, cap)
    return max(1, workers)


class WorkerPool:
    """Thread pool with a shared node budget."""

    def __init__(self, workers: Optional[int] = None, budget: Optional[int] = None):
        self.workers = worker_cap(workers)
        self.budget = budget
        self.nodes: int = 0
        self.lock = threading.RLock()
        self.executor: Optional[ThreadPoolExecutor] = None

    # -------- public API --------
    def map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        items = list(items)
        if self.workers == 1 or len(items) <= 1:
            return [fn(x) for x in items]
        self._ensure_executor()
        return list(self.executor.map(fn, items))

    def charge(self, nodes: int = 1) -> None:
        """Count search nodes; raise once the budget is spent."""
        with self.lock:
            self.nodes += nodes
            if self.budget is not None and self.nodes > self.budget:
                raise BudgetExceeded(
                    f"search budget of {self.budget} nodes exhausted",
                    stage="search", budget=self.budget, nodes=self.nodes,
                )

    # -------- internal --------
    def _ensure_executor(self):
        with self.lock:
            if self.executor is None:
                self.executor = ThreadPoolExecutor(max_workers=self.workers)

    def close(self):
        with self.lock:
            if self.executor is not None:
                try:
                    self.executor.shutdown(wait=True)
                finally:
                    self.executor = None

    def __enter__(self) -> "WorkerPool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
