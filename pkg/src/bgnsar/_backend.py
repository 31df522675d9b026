"""Select the compiled kernels when available, else the pure-Python twin.

Set ``BGNSAR_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("BGNSAR_BACKEND", "").lower() == "python":
        return _pykernels, "python"
    try:
        from . import _kernels
    except ImportError:
        return _pykernels, "python"
    return _kernels, "cython"


kernels, BACKEND = _load()

__all__ = ["kernels", "BACKEND", "set_backend", "available"]


def set_backend(name: str) -> str:
    """Switch the active kernel module ("cython" or "python"); returns the previous name."""
    global kernels, BACKEND
    prev = BACKEND
    if name == "python":
        kernels, BACKEND = _pykernels, "python"
    elif name == "cython":
        from . import _kernels

        kernels, BACKEND = _kernels, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
    return prev


def available() -> list[str]:
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return names
    return ["cython", "python"]
