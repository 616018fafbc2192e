"""Deterministic worker-pool helpers honoring the FADKIT_THREADS contract."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigError

ENV_VAR = "FADKIT_THREADS"


def worker_count(raw=None) -> int:
    """Resolve the thread cap: unset or 0 means auto (cpu count)."""
    if raw is None:
        raw = os.environ.get(ENV_VAR, "")
    if raw == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_VAR} must be a nonnegative integer, got {raw!r}") from None
    if value < 0:
        raise ConfigError(f"{ENV_VAR} must be a nonnegative integer, got {value}")
    return value if value > 0 else (os.cpu_count() or 1)


def parallel_map(fn, items, threads) -> list:
    """map() with optional thread workers; results keep input order."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))
