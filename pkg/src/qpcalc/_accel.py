"""Backend switch for the compiled kernels.

Set ``QPCALC_DISABLE_NUMBA=1`` to run every kernel on its pure-numpy path.
Tests and benchmarks flip the backend temporarily with :func:`backend`.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from functools import wraps

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_FLAG = os.environ.get("QPCALC_DISABLE_NUMBA", "").strip().lower()
_state = {"numba": HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")}


def numba_enabled() -> bool:
    return _state["numba"]


def active_backend() -> str:
    return "numba" if _state["numba"] else "numpy"


@contextmanager
def backend(name: str):
    """Temporarily select ``"numba"`` or ``"numpy"`` kernels."""
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev = _state["numba"]
    _state["numba"] = name == "numba"
    try:
        yield
    finally:
        _state["numba"] = prev


def njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def dispatch(compiled):
    """Decorate the numpy implementation; calls go to ``compiled`` when enabled."""

    def deco(fallback):
        @wraps(fallback)
        def run(*args):
            if _state["numba"]:
                return compiled(*args)
            return fallback(*args)

        run.compiled = compiled
        run.fallback = fallback
        return run

    return deco
