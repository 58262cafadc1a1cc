"""Order-preserving parallel map for independent per-block work."""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "BLOCKCERT_THREADS"


def thread_count():
    """Worker count from ``BLOCKCERT_THREADS`` (default 1, i.e. serial)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def parallel_map(func, items):
    """``[func(x) for x in items]``, possibly on a thread pool.

    Results are returned in input order so output never depends on the
    schedule.
    """
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
