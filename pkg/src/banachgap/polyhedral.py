"""Finite descriptions of symmetric polytopes.

A symmetric polyhedral norm on R^n is stored either through a functional
matrix ``F`` (``||x|| = max |F x|``) or through a generator matrix ``V``
(the unit ball is ``conv(+-V)``).  The two descriptions are polar to each
other, so converting between them is a convex hull computation.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial import ConvexHull, QhullError

#: Hard cap on the number of rows any description may hold.
MAX_ROWS = 400_000


class PolyhedralTooLarge(RuntimeError):
    """Raised when an explicit polyhedral description would be too large."""


def sign_vectors(n: int) -> np.ndarray:
    """Return the ``2**(n-1)`` sign vectors of length ``n`` with first entry +1."""
    if n == 0:
        return np.zeros((1, 0))
    if n == 1:
        return np.ones((1, 1))
    if 2 ** (n - 1) > MAX_ROWS:
        raise PolyhedralTooLarge(f"2**{n - 1} sign vectors exceed the row cap")
    rest = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1))).reshape(-1, n - 1)
    return np.hstack([np.ones((rest.shape[0], 1)), rest])


def dedupe_symmetric(rows: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Drop zero rows and rows equal (up to sign) to an earlier row."""
    rows = np.asarray(rows, dtype=float)
    if rows.size == 0:
        return rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0)
    scale = max(np.abs(rows).max(), 1.0)
    keep = np.abs(rows).max(axis=1) > tol * scale
    rows = rows[keep]
    if rows.shape[0] == 0:
        return rows
    # canonical sign: first entry of largest magnitude is positive
    piv = np.argmax(np.abs(rows) > tol * scale, axis=1)
    sgn = np.sign(rows[np.arange(rows.shape[0]), piv])
    canon = rows * sgn[:, None]
    key = np.round(canon / (tol * scale * 1e2)).astype(np.int64)
    _, idx = np.unique(key, axis=0, return_index=True)
    return canon[np.sort(idx)]


def _hull(points: np.ndarray) -> ConvexHull:
    try:
        return ConvexHull(points)
    except QhullError:
        return ConvexHull(points, qhull_options="QJ")


def polar_vertices(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Vertices (one per +- pair) of ``{u : |A u| <= 1}``.

    Parameters
    ----------
    A : (m, k) array
        Rows must span R^k so that the set is bounded.

    Returns
    -------
    (r, k) array
        Each row ``u`` is a vertex; ``-u`` is implied.
    """
    A = np.asarray(A, dtype=float)
    k = A.shape[1]
    if k == 0:
        return np.zeros((0, 0))
    if np.linalg.matrix_rank(A) < k:
        raise ValueError("functional rows do not span; the polytope is unbounded")
    if k == 1:
        return np.array([[1.0 / np.abs(A).max()]])
    A = extreme_points(A, tol)
    pts = np.vstack([A, -A])
    hull = _hull(pts)
    normals = hull.equations[:, :-1]
    offsets = -hull.equations[:, -1]
    verts = normals / offsets[:, None]
    return dedupe_symmetric(verts, tol=1e-9)


def extreme_points(A: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Rows of ``A`` (one per +- pair) that are extreme in ``conv(+-A)``."""
    A = dedupe_symmetric(np.asarray(A, dtype=float), tol)
    k = A.shape[1]
    if k <= 1 or A.shape[0] <= k:
        if k == 1:
            return A[[np.argmax(np.abs(A[:, 0]))]]
        return A
    if np.linalg.matrix_rank(A) < k:
        return A
    pts = np.vstack([A, -A])
    hull = _hull(pts)
    idx = np.unique(hull.vertices % A.shape[0])
    return A[idx]


def polytope_vertices_bruteforce(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Reference enumeration of the vertices of ``{u : |A u| <= 1}``.

    Solves every k-subset of active constraints with every sign pattern.
    Exponential; intended for cross-checking :func:`polar_vertices`.
    """
    A = np.asarray(A, dtype=float)
    m, k = A.shape
    found = []
    for rows in itertools.combinations(range(m), k):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        for signs in itertools.product((1.0, -1.0), repeat=k):
            u = np.linalg.solve(M, np.array(signs))
            if np.abs(A @ u).max() <= 1 + tol:
                found.append(u)
    return dedupe_symmetric(np.array(found), tol=1e-8)


def block_diag_rows(blocks: list[np.ndarray], widths: list[int]) -> np.ndarray:
    """Stack row blocks, each padded with zeros into its own column range."""
    total = sum(widths)
    out = []
    start = 0
    for B, w in zip(blocks, widths):
        R = np.zeros((B.shape[0], total))
        R[:, start:start + w] = B
        out.append(R)
        start += w
    return np.vstack(out)


def product_rows(blocks: list[np.ndarray], widths: list[int]) -> np.ndarray:
    """All concatenations ``(+-b_1, ..., +-b_m)`` of rows of each block.

    The global sign is fixed by keeping the first block unsigned, which
    suffices for symmetric descriptions.
    """
    count = 1
    for i, B in enumerate(blocks):
        count *= B.shape[0] * (1 if i == 0 else 2)
    if count > MAX_ROWS:
        raise PolyhedralTooLarge(f"product description needs {count} rows")
    signed = [blocks[0]] + [np.vstack([B, -B]) for B in blocks[1:]]
    out = signed[0]
    for B in signed[1:]:
        out = np.hstack([np.repeat(out, B.shape[0], axis=0), np.tile(B, (out.shape[0], 1))])
    assert out.shape[1] == sum(widths)
    return out
