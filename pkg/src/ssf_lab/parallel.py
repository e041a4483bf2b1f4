"""Deterministic fan-out of independent numbered tasks.

Results are merged by task index, and BLAS/LAPACK pools are pinned to one
thread for the duration, so outputs are bit-identical for any worker count:
parallelism comes only from running independent tasks side by side.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, TypeVar

from threadpoolctl import threadpool_limits

T = TypeVar("T")

__all__ = ["run_indexed_tasks"]


def run_indexed_tasks(n_tasks: int, task: Callable[[int], T], workers: int = 1) -> list[T]:
    """Run task(0..n_tasks-1), returning results ordered by index."""
    with threadpool_limits(limits=1):
        if workers <= 1 or n_tasks <= 1:
            return [task(i) for i in range(n_tasks)]
        out: list[T] = [None] * n_tasks  # type: ignore[list-item]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(task, i): i for i in range(n_tasks)}
            for fut in as_completed(futures):
                out[futures[fut]] = fut.result()
        return out
