"""Kernel backend selection.

The compiled extension is used when importable; setting the environment
variable ``PERCROUTE_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
from __future__ import annotations

import os

from . import _fallback

if os.environ.get("PERCROUTE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

mix64 = _impl.mix64
edge_open = _impl.edge_open
open_mask = _impl.open_mask
component_labels = _impl.component_labels

__all__ = ["BACKEND", "mix64", "edge_open", "open_mask", "component_labels"]
