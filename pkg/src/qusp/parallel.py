"""Deterministic work partitioning for pure per-item computations.

QUSP_THREADS caps the worker count (default 1, i.e. serial).  Results are
always merged back in input order, so the output is identical no matter
how the items were partitioned.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get("QUSP_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        raise ValueError(f"QUSP_THREADS must be an integer, got {raw!r}") from None
    return max(1, count)


def map_ordered(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    seq: Sequence[T] = list(items)
    workers = worker_count()
    if workers == 1 or len(seq) < 2:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
