"""Kernel backend selection.

The dense kernels ship in two interchangeable implementations: numba
@njit loops and a pure-numpy fallback. Selection order: the
REPALIGN_NUMBA environment variable ("0"/"false"/"off" disables numba,
anything else requests it), then numba importability. The decision is
made once at import; tests and benchmarks can address either
implementation module directly.
"""

from __future__ import annotations

import os

_FALSEY = {"0", "false", "off", "no"}


def _numba_requested() -> bool:
    return os.environ.get("REPALIGN_NUMBA", "").strip().lower() not in _FALSEY


def _probe_numba() -> bool:
    if not _numba_requested():
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


HAVE_NUMBA = _probe_numba()
BACKEND = "numba" if HAVE_NUMBA else "numpy"


def worker_count(default: int = 4) -> int:
    """Worker cap for per-condition / per-layer pools (REPALIGN_THREADS)."""
    raw = os.environ.get("REPALIGN_THREADS", "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            cap = default
        return max(1, cap)
    cpus = os.cpu_count() or 1
    return max(1, min(default, cpus))
