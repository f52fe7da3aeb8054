"""Pure numpy versions of the compiled nearest-point reductions."""

import numpy as np

_CHUNK = 2_000_000


def _rows_per_chunk(m: int, d: int) -> int:
    return max(1, _CHUNK // max(1, m * d))


def row_min_cheb(a, b):
    """Smallest Chebyshev distance from each row of ``a`` to ``b``, with argmin."""
    out = np.empty(a.shape[0])
    arg = np.empty(a.shape[0], dtype=np.intp)
    step = _rows_per_chunk(b.shape[0], a.shape[1])
    for s in range(0, a.shape[0], step):
        diff = np.abs(a[s:s + step, None, :] - b[None, :, :]).max(axis=2)
        arg[s:s + step] = diff.argmin(axis=1)
        out[s:s + step] = diff.min(axis=1)
    return out, arg


def row_min_lp(a, b, p):
    """Smallest l_p distance (finite p) from each row of ``a`` to ``b``, with argmin."""
    out = np.empty(a.shape[0])
    arg = np.empty(a.shape[0], dtype=np.intp)
    step = _rows_per_chunk(b.shape[0], a.shape[1])
    for s in range(0, a.shape[0], step):
        diff = (np.abs(a[s:s + step, None, :] - b[None, :, :]) ** p).sum(axis=2)
        arg[s:s + step] = diff.argmin(axis=1)
        out[s:s + step] = diff.min(axis=1)
    return (out if p == 1.0 else out ** (1.0 / p)), arg


def sup_min_cheb(a, b):
    """``max_i min_k |a_i - b_k|_inf``."""
    return float(row_min_cheb(a, b)[0].max()) if a.shape[0] else 0.0
