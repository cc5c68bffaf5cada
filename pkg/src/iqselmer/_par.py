"""Deterministic parallel map helper."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    """Worker count: SELMER_THREADS if set, else the hardware count."""
    raw = os.environ.get("SELMER_THREADS", "").strip()
    if raw:
        n = int(raw)
        if n < 1:
            raise ValueError("SELMER_THREADS must be a positive integer")
        return n
    return os.cpu_count() or 1


def pmap(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """map() preserving input order; parallel when more than one worker."""
    seq: Sequence[T] = list(items)
    n = min(thread_count(), len(seq))
    if n <= 1:
        return [fn(x) for x in seq]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, seq))
