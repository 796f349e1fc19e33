"""Thread-pool helper honoring the MF_THREADS environment cap."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("MF_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        n = min(4, os.cpu_count() or 1)
    return n


def map_parallel(fn, items):
    """Order-preserving map over a thread pool capped by MF_THREADS.

    Results are deterministic because tasks are independent and outputs are
    collected in submission order.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
