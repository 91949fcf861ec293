"""Thread-pool helper. HEATLAB_THREADS caps the worker count.

The compiled kernels release the GIL, so independent solves (one per lambda,
one per Jacobian column, one per root bracket) scale with threads. Results
are returned in input order, keeping every caller deterministic.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    env = os.environ.get("HEATLAB_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"HEATLAB_THREADS must be an integer, got {env!r}")
        return max(1, n)
    return min(4, os.cpu_count() or 1)


def parallel_map(fn, items):
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as ex:
        return list(ex.map(fn, items))
