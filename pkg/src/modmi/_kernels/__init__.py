"""Kernel backend selection and the chunked driver.

The compiled extension (``_cykernels``) is used when it is importable; the
numpy fallback (``_pykernels``) otherwise.  Set ``MODMI_BACKEND`` to
``compiled`` or ``python`` to force one.  Both produce bit-identical output;
chunks are processed in a fixed order and reduced sequentially, so results
also do not depend on ``MODMI_THREADS`` (a cap on worker threads, default 1).
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _pykernels

try:
    from . import _cykernels
except ImportError:
    _cykernels = None

# Chunk sizes bound temporary memory (assign materializes chunk*k doubles)
# and fix the summation order that makes runs bit-reproducible.
ASSIGN_CHUNK = 1024
UPDATE_CHUNK = 65536


def _select_backend():
    choice = os.environ.get("MODMI_BACKEND", "auto")
    if choice == "python":
        return _pykernels
    if choice == "compiled":
        if _cykernels is None:
            raise ImportError(
                "MODMI_BACKEND=compiled but the extension is not built; "
                "run: python setup.py build_ext --inplace"
            )
        return _cykernels
    if choice != "auto":
        raise ValueError(f"MODMI_BACKEND must be auto|python|compiled, got {choice!r}")
    return _cykernels if _cykernels is not None else _pykernels


_backend = _select_backend()
backend_name = _backend.name


def available_backends():
    """Kernel implementations importable in this build."""
    mods = {"python": _pykernels}
    if _cykernels is not None:
        mods["compiled"] = _cykernels
    return mods


def thread_count() -> int:
    raw = os.environ.get("MODMI_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"MODMI_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _map_chunks(work, bounds, consume, n_threads):
    """Run ``work(lo, hi)`` per chunk, feeding results to ``consume`` strictly
    in chunk order with a bounded number in flight."""
    if n_threads <= 1:
        for lo, hi in bounds:
            consume(work(lo, hi))
        return
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        pending = deque()
        for lo, hi in bounds:
            pending.append(pool.submit(work, lo, hi))
            if len(pending) >= n_threads * 2:
                consume(pending.popleft().result())
        while pending:
            consume(pending.popleft().result())


def _bounds(n, chunk):
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def assign_labels(x, centroids, backend=None):
    """Nearest-centroid labels and squared distances for all points.

    ``x`` (L, d) and ``centroids`` (k, d) must be float64 C-order.
    """
    impl = backend or _backend
    n = x.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dist2 = np.empty(n, dtype=np.float64)

    def work(lo, hi):
        impl.assign_chunk(x[lo:hi], centroids, labels[lo:hi], dist2[lo:hi])

    _map_chunks(work, _bounds(n, ASSIGN_CHUNK), lambda _: None, thread_count())
    return labels, dist2


def accumulate_means(x, labels, k, backend=None):
    """Per-centroid float64 sums and int64 counts.

    Each chunk accumulates into its own buffer in point order; partials are
    then reduced in chunk order, the same tree for any thread count.
    """
    impl = backend or _backend
    n, d = x.shape
    sums = np.zeros((k, d), dtype=np.float64)
    counts = np.zeros(k, dtype=np.int64)

    def work(lo, hi):
        ps = np.zeros((k, d), dtype=np.float64)
        pc = np.zeros(k, dtype=np.int64)
        impl.update_chunk(x[lo:hi], labels[lo:hi], ps, pc)
        return ps, pc

    def consume(partial):
        np.add(sums, partial[0], out=sums)
        np.add(counts, partial[1], out=counts)

    _map_chunks(work, _bounds(n, UPDATE_CHUNK), consume, thread_count())
    return sums, counts
