"""Backend selection for the nearest-point kernels.

The compiled extension is used when it imports; setting the environment
variable ``BANACHGAP_PURE=1`` forces the numpy fallback.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("BANACHGAP_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def _c(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def row_min_cheb(a, b):
    """Chebyshev nearest distances and indices from rows of ``a`` to rows of ``b``."""
    return _impl.row_min_cheb(_c(a), _c(b))


def row_min_lp(a, b, p: float):
    """l_p nearest distances and indices from rows of ``a`` to rows of ``b``."""
    if p == np.inf:
        return row_min_cheb(a, b)
    return _impl.row_min_lp(_c(a), _c(b), float(p))


def sup_min_cheb(a, b) -> float:
    """Directed Hausdorff distance ``max_i min_k |a_i - b_k|_inf``."""
    return float(_impl.sup_min_cheb(_c(a), _c(b)))
