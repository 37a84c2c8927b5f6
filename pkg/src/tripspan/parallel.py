"""Partitioned execution with order-independent reductions.

Workers only ever see a list of independent tasks; the caller folds the
results with an associative, commutative reduction, so the output does not
depend on how many processes ran or in which order they finished.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence


def run_tasks(fn: Callable, tasks: Sequence, workers: int = 1) -> list:
    """Apply ``fn`` to every task; results come back in task order."""
    tasks = list(tasks)
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def chunk(items: Iterable, parts: int) -> list[list]:
    """Round-robin split into at most ``parts`` non-empty lists."""
    items = list(items)
    parts = max(1, min(parts, len(items)))
    out = [[] for _ in range(parts)]
    for i, item in enumerate(items):
        out[i % parts].append(item)
    return [c for c in out if c]
