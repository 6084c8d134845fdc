"""Kernel dispatch: compiled extension when importable, NumPy otherwise.

Set ``FRACGCG_PURE_PYTHON=1`` to force the NumPy path.
"""

import os

from . import _kernels_py

BACKEND = "python"
order_sums = _kernels_py.order_sums
aniso_sums = _kernels_py.aniso_sums

if os.environ.get("FRACGCG_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        BACKEND = "cython"
        order_sums = _compiled.order_sums
        aniso_sums = _compiled.aniso_sums

__all__ = ["BACKEND", "order_sums", "aniso_sums"]
