"""Job-level parallelism shared by the ensemble, centrality and percolation code.

Work is always split into the same chunks and reduced in chunk order, so the
numbers do not depend on how many workers ran them.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")

SOURCE_CHUNK = 512


def resolve_jobs(jobs: int | None = None) -> int:
    if jobs is None:
        env = os.environ.get("OWNET_JOBS")
        jobs = int(env) if env else 1
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    return jobs


def run_tasks(fn: Callable[..., T], tasks: Sequence[tuple], jobs: int | None = None) -> list[T]:
    """Call ``fn(*task)`` for every task; results come back in task order."""
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def chunked(n: int, size: int = SOURCE_CHUNK) -> list[tuple[int, int]]:
    return [(lo, min(lo + size, n)) for lo in range(0, n, size)]
