"""Kernel backend selection.

The compiled extension ``_core`` is used when it imports; otherwise the numpy
implementation in ``_fallback`` takes over.  Setting ``MLNOISE_BACKEND=python``
forces the fallback.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from . import _fallback

try:
    from . import _core
except ImportError:  # pragma: no cover - depends on the build
    _core = None

BACKENDS = {"python": _fallback}
if _core is not None:
    BACKENDS["compiled"] = _core

if os.environ.get("MLNOISE_BACKEND", "").lower() == "python" or _core is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"


def get(name=None):
    """Kernel module for ``name`` (default: the active backend)."""
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {sorted(BACKENDS)}") from None


@lru_cache(maxsize=32)
def twiddles(n: int) -> np.ndarray:
    """``exp(-2 pi i j / n)`` for ``j < n/2``; read-only, shared."""
    tw = np.exp(-2j * np.pi * np.arange(max(n // 2, 1)) / n)
    tw.flags.writeable = False
    return tw


def split_rows(n_rows: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n_rows))
    edges = np.linspace(0, n_rows, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def run_split(fn, n_rows: int, workers: int) -> None:
    """Call ``fn(lo, hi)`` over disjoint row ranges, on ``workers`` threads."""
    ranges = split_rows(n_rows, workers)
    if len(ranges) <= 1:
        for lo, hi in ranges:
            fn(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        for f in [pool.submit(fn, lo, hi) for lo, hi in ranges]:
            f.result()
