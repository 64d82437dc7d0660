"""Backend selection for the hot kernels.

Every kernel in :mod:`hornfall.kernels` exists twice: a numba ``@njit`` version
and a pure-numpy version.  The environment variable ``HORNFALL_BACKEND``
(``numba`` or ``numpy``) picks the default; ``HORNFALL_DISABLE_NUMBA=1`` is an
alias for ``HORNFALL_BACKEND=numpy``.  Without numba installed the numpy path
is always used.
"""

from __future__ import annotations

import os

try:
    import numba  # noqa: F401
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


BACKENDS = ("numba", "numpy")


def _default_backend() -> str:
    if os.environ.get("HORNFALL_DISABLE_NUMBA", "") not in ("", "0"):
        return "numpy"
    requested = os.environ.get("HORNFALL_BACKEND", "numba").strip().lower()
    if requested not in BACKENDS:
        raise ValueError(f"HORNFALL_BACKEND must be one of {BACKENDS}, got {requested!r}")
    if requested == "numba" and not NUMBA_AVAILABLE:
        return "numpy"
    return requested


BACKEND = _default_backend()


def resolve(backend: str | None) -> str:
    """Map an optional per-call override onto an available backend."""
    if backend is None:
        return BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


__all__ = ["BACKEND", "BACKENDS", "NUMBA_AVAILABLE", "njit", "resolve"]
