"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``STEKLOV_NEUMANN_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("STEKLOV_NEUMANN_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _kernels_py
else:
    _impl = _kernels_py

harmonic_series = _impl.harmonic_series
label_components = _impl.label_components

__all__ = ["BACKEND", "harmonic_series", "label_components"]
