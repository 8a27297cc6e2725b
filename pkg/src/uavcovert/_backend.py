"""Kernel backend selection.

Hot loops are written twice: an explicit-loop version compiled with numba's
``njit`` and a vectorised numpy version.  Setting ``UAVCOVERT_DISABLE_NUMBA=1``
in the environment skips importing numba altogether and makes numpy the only
backend.  Otherwise numba is the default and :func:`set_backend` can switch at
runtime (used by the tests and the backend benchmark).
"""
from __future__ import annotations

import contextlib
import os

_TRUTHY = {"1", "true", "yes", "on"}

NUMBA_DISABLED = os.environ.get("UAVCOVERT_DISABLE_NUMBA", "").strip().lower() in _TRUTHY

numba = None
if not NUMBA_DISABLED:
    try:
        import numba  # noqa: F811
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None

NUMBA_AVAILABLE = numba is not None

_backend = "numba" if NUMBA_AVAILABLE else "numpy"


def jit(func):
    """``numba.njit(cache=True)`` when numba is usable, identity otherwise."""
    if NUMBA_AVAILABLE:
        return numba.njit(cache=True, nogil=True)(func)
    return func


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend unavailable (disabled by UAVCOVERT_DISABLE_NUMBA or not installed)")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if NUMBA_AVAILABLE else ("numpy",)
