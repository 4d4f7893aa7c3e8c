"""Process-wide runtime knobs.

Batch operations split their work into chunks along the pulse axis. With
``TEMPOTRON_THREADS`` set above 1, chunks are processed by a thread pool
(numpy releases the GIL for the heavy array work); results are always
reassembled in order, so the output is independent of the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import InvalidConfig

THREADS_ENV = "TEMPOTRON_THREADS"
DEFAULT_CHUNK = 512


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise InvalidConfig(f"{THREADS_ENV} must be an integer, got {raw!r}")
    if n < 1:
        raise InvalidConfig(f"{THREADS_ENV} must be >= 1, got {n}")
    return n


def worker_map(fn, array: np.ndarray, axis: int, chunk: int = DEFAULT_CHUNK) -> list:
    """Apply ``fn`` to successive slabs of ``array`` along ``axis``.

    Returns the per-slab results in slab order.
    """
    n = array.shape[axis]
    slabs = [
        np.take(array, np.arange(lo, min(lo + chunk, n)), axis=axis)
        for lo in range(0, n, chunk)
    ]
    workers = worker_count()
    if workers == 1 or len(slabs) == 1:
        return [fn(s) for s in slabs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, slabs))
