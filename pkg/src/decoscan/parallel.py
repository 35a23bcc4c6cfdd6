"""Deterministic fan-out of pure per-point work.

The DECOH_THREADS environment variable caps the worker count (default 1).
Results are always assembled in input order, so output is identical for any
thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

from .errors import ConfigError

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "DECOH_THREADS"


def thread_count() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    return max(1, value)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Map ``fn`` over ``items``, in parallel when allowed, preserving order."""
    seq: Sequence[T] = list(items)
    workers = thread_count()
    if workers <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
