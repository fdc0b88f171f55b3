"""Thread-pool helper honoring the MORSEFLOW_THREADS environment variable.

MORSEFLOW_THREADS=0 means "auto" (one worker per CPU); unset or 1 keeps
everything sequential, which is also the configuration the documented
runtimes refer to.  Work items are pure functions of their inputs and
results are returned in input order, so the thread count never changes
any output.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("MORSEFLOW_THREADS", "1")
    try:
        k = int(raw)
    except ValueError:
        return 1
    if k == 0:
        return os.cpu_count() or 1
    return max(1, k)


def pmap(fn, items):
    """Ordered map, sequential unless MORSEFLOW_THREADS asks for workers."""
    items = list(items)
    k = thread_count()
    if k <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))
