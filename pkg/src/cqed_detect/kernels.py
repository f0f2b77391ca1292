"""Kernel dispatch: the compiled extension when importable, else NumPy.

Set ``CQED_DETECT_PURE_PYTHON=1`` to force the NumPy path.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("CQED_DETECT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

pole_sums = _impl.pole_sums
spectral_sum = _impl.spectral_sum

__all__ = ["BACKEND", "pole_sums", "spectral_sum"]
