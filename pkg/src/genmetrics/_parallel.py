"""Deterministic block-parallel execution helpers.

All heavy operations split their row ranges into fixed-size blocks, evaluate
blocks on a thread pool (numpy releases the GIL inside BLAS), and combine the
per-block results in ascending block order. Block boundaries depend only on
the input sizes, never on the worker count, so results are bit-identical for
any number of threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, Sequence, TypeVar

from threadpoolctl import threadpool_limits

T = TypeVar("T")

_ENV_VAR = "GENMETRICS_THREADS"


def worker_count() -> int:
    """Worker threads to use; capped by the GENMETRICS_THREADS env variable."""
    raw = os.environ.get(_ENV_VAR, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 0
        if n >= 1:
            return n
    return os.cpu_count() or 1


def iter_blocks(n: int, block: int) -> Iterator[tuple[int, int]]:
    """Yield (start, stop) row ranges covering [0, n) in fixed-size blocks."""
    for start in range(0, n, block):
        yield start, min(start + block, n)


def map_blocks(fn: Callable[[int, int], T], n: int, block: int) -> list[T]:
    """Apply ``fn(start, stop)`` to every block; results in block order.

    Runs sequentially when a single worker is configured, otherwise on a
    thread pool with BLAS pinned to one thread per worker (our pool is the
    only parallelism source, so workers never contend with BLAS threading).
    The returned list order is always ascending block index, which is what
    makes downstream reductions deterministic.
    """
    ranges = list(iter_blocks(n, block))
    workers = worker_count()
    if workers <= 1 or len(ranges) <= 1:
        return [fn(start, stop) for start, stop in ranges]
    with threadpool_limits(limits=1, user_api="blas"):
        with ThreadPoolExecutor(max_workers=min(workers, len(ranges))) as pool:
            futures = [pool.submit(fn, start, stop) for start, stop in ranges]
            return [f.result() for f in futures]


def map_ordered(fn: Callable[[T], object], items: Sequence[T]) -> list:
    """Evaluate independent work items concurrently, results in input order."""
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with threadpool_limits(limits=1, user_api="blas"):
        with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
            return list(pool.map(fn, items))


def cross_block_rows(other_count: int, budget: int = 4_000_000) -> int:
    """Query-block height for pairwise kernels against ``other_count`` columns.

    Keeps each intermediate block at roughly ``budget`` float64 elements.
    Depends only on the input size, so blocking is machine-independent.
    """
    return max(1, budget // max(1, other_count))
