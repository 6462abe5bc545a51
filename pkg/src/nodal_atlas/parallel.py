"""Worker-count policy and an order-preserving thread map."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "NODAL_ATLAS_THREADS"


def worker_count(default: int = 1) -> int:
    """Threads for library loops; NODAL_ATLAS_THREADS overrides the default."""
    val = os.environ.get(ENV_THREADS, "").strip()
    if not val:
        return default
    try:
        n = int(val)
    except ValueError:
        return default
    return max(1, n)


def pmap(fn, items, workers: int | None = None) -> list:
    """[fn(x) for x in items], computed on a thread pool when workers > 1.

    Results come back in input order, so callers that only combine them in
    that order are deterministic regardless of the worker count.
    """
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
