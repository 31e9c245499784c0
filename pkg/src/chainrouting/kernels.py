"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``CHAINROUTING_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("CHAINROUTING_PURE"):
    try:
        from . import _kernels_c  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        _impl = _kernels_c
        BACKEND = "cython"

max_flow_paths = _impl.max_flow_paths
transitive_closure = _impl.transitive_closure


def available_backends() -> dict[str, object]:
    """All importable kernel modules, keyed by backend name."""
    out: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _kernels_c  # type: ignore[attr-defined]
    except ImportError:
        return out
    out["cython"] = _kernels_c
    return out
