"""Kernel backend selection.

The compiled extension is used when it imports cleanly; otherwise, or when
``HS_LAB_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
pure-Python mirror is used. Both expose ``horner`` and ``real_roots``.
"""

import os

_forced = os.environ.get("HS_LAB_PURE_PYTHON", "") not in ("", "0")

if _forced:
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _kernels_py as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
