"""Optional thread parallelism with deterministic result order."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from .errors import InputError

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "PFL_THREADS"


def thread_count() -> int:
    """Worker cap from ``PFL_THREADS`` (default 1)."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InputError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InputError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def parallel_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[fn(x) for x in items]``, possibly on several threads; order is preserved."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
