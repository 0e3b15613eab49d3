"""Kernel dispatch: the compiled extension when it is importable, otherwise
the numpy fallback.

Set ``TETRATSP_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _fallback


def _load() -> tuple[ModuleType, str]:
    if os.environ.get("TETRATSP_PURE_PYTHON", "") not in ("", "0"):
        return _fallback, "python"
    try:
        from . import _kernels
    except ImportError:
        return _fallback, "python"
    return _kernels, "cython"


_impl, BACKEND = _load()

held_karp = _impl.held_karp
stoer_wagner = _impl.stoer_wagner
two_opt = _impl.two_opt


def backends() -> dict[str, ModuleType]:
    """All importable kernel implementations by name."""
    out = {"python": _fallback}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
