"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set MTX_FORCE_PYTHON=1 to force the fallback (used by the benchmark and the
backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("MTX_FORCE_PYTHON"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernel_py

ring_walk = _impl.ring_walk


def backend_name() -> str:
    return _impl.BACKEND


def python_ring_walk(*args, **kwargs):
    """Always-available reference implementation."""
    return _kernel_py.ring_walk(*args, **kwargs)
