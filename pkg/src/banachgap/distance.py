"""Certified distances from points to subspaces, balls and spheres.

Every routine returns elementwise lower and upper bounds.  Euclidean and
polyhedral norms give (numerically) exact values; other norms use batched
convex minimisation with a dual certificate for the lower bound.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from .norms import NormedSpace, Quotient, _orth

_GOLD = (np.sqrt(5.0) - 1.0) / 2.0

_quotient_cache: dict = {}


def _key(space: NormedSpace, B: np.ndarray):
    return (id(space), B.shape, np.round(B, 12).tobytes())


def quotient_of(space: NormedSpace, B: np.ndarray) -> Quotient:
    """Cached quotient ``space / span(B)``."""
    key = _key(space, B)
    hit = _quotient_cache.get(key)
    if hit is not None and hit[0] is space:
        return hit[1]
    Q = Quotient(space, B)
    if len(_quotient_cache) > 256:
        _quotient_cache.clear()
    _quotient_cache[key] = (space, Q)
    return Q


def dist_bounds(space: NormedSpace, X, B, tol: float = 1e-10, iters: int = 200):
    """Bounds on ``dist(x, span B)`` for each row ``x`` of ``X``.

    Returns
    -------
    lo, hi : arrays
        Certified bounds.
    C : (N, k) array
        Coefficients of a near-nearest point ``B c``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    N, k = X.shape[0], B.shape[1]
    if k == 0:
        lo, hi = space.norm_bounds(X)
        return lo, hi, np.zeros((N, 0))
    if space.is_euclidean:
        G = space.factor
        GB = G @ B
        GX = X @ G.T
        C = np.linalg.lstsq(GB, GX.T, rcond=None)[0].T
        v = np.linalg.norm(GX - C @ GB.T, axis=1)
        return v, v, C
    if space.is_polyhedral:
        Q = quotient_of(space, B)
        if Q._fast_polyhedral:
            v = Q.norm(X @ Q.W)
            C = np.full((N, k), np.nan)
            return v, v, C
    if k == 1:
        return _dist_line(space, X, B[:, 0])
    return _dist_newton(space, X, B, tol=tol, iters=iters)


def dist_lp(space: NormedSpace, x, B) -> tuple[float, np.ndarray]:
    """Distance to ``span B`` in a polyhedral norm by linear programming.

    Independent of the quotient-functional route used by
    :func:`dist_bounds`; the two are cross-checked in the tests.
    """
    F = space.functionals
    x = np.asarray(x, dtype=float)
    B = np.asarray(B, dtype=float).reshape(space.dim, -1)
    k = B.shape[1]
    FB = F @ B
    Fx = F @ x
    # variables (c, t): minimise t subject to |F x - F B c| <= t
    ones = np.ones((F.shape[0], 1))
    A_ub = np.vstack([np.hstack([-FB, -ones]), np.hstack([FB, -ones])])
    b_ub = np.concatenate([-Fx, Fx])
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * (k + 1), method="highs")
    if res.status != 0:
        raise RuntimeError(f"distance LP failed: {res.message}")
    return float(res.x[-1]), res.x[:k]


def _golden(f, a, c, n_iter):
    """Vectorised golden-section bracketing of convex scalar maps."""
    for _ in range(n_iter):
        m1 = a + (c - a) * (1 - _GOLD)
        m2 = a + (c - a) * _GOLD
        left = f(m1) < f(m2)
        c = np.where(left, m2, c)
        a = np.where(left, a, m1)
    return a, c


def _dist_line(space, X, b, n_iter: int = 90):
    """Golden-section search on the convex map ``t -> ||x - t b||``."""
    nb = float(space.norm_bounds(b[None, :])[1][0])
    nx = space.norm_bounds(X)[1]
    R = 2.0 * nx / nb + 1e-12

    def f(t):
        return space.norm_bounds(X - t[:, None] * b[None, :])[1]

    a, c = _golden(f, -R, R.copy(), n_iter)
    t = 0.5 * (a + c)
    lo_t, hi = space.norm_bounds(X - t[:, None] * b[None, :])
    lo = np.maximum(lo_t - nb * 0.5 * (c - a) - 1e-15 * nx, 0.0)
    return lo, hi, t[:, None]


def _dist_newton(space, X, B, tol=1e-10, iters=200):
    """Batched Levenberg-damped Newton on ``c -> ||x - B c||``.

    The upper bound is the attained value; the lower bound comes from the
    norming functional at the final residual, projected onto the
    annihilator of ``span B`` and renormalised in the dual norm.
    """
    N, k = X.shape[0], B.shape[1]
    Bo = _orth(B)
    # work in an orthonormal basis of the subspace; convert at the end
    C = X @ Bo
    mu = np.full(N, 1e-3)

    def value_grad(Cm):
        R = X - Cm @ Bo.T
        v, G = space.grad(R)
        return v, -(G @ Bo)

    v, g = value_grad(C)
    active = np.ones(N, dtype=bool)
    scale = np.maximum(space.norm(X), 1e-300)
    for it in range(iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ca, ga, va = C[idx], g[idx], v[idx]
        h = 1e-7 * np.maximum(1.0, np.abs(Ca).max(axis=1))
        H = np.empty((idx.size, k, k))
        for j in range(k):
            Cj = Ca.copy()
            Cj[:, j] += h
            Rj = X[idx] - Cj @ Bo.T
            _, Gj = space.grad(Rj)
            H[:, :, j] = (-(Gj @ Bo) - ga) / h[:, None]
        H = 0.5 * (H + H.transpose(0, 2, 1))
        improved = np.zeros(idx.size, dtype=bool)
        for _trial in range(6):
            Hd = H + (mu[idx] * va)[:, None, None] * np.eye(k)
            try:
                step = -np.linalg.solve(Hd, ga[:, :, None])[:, :, 0]
            except np.linalg.LinAlgError:
                step = -ga
            Cn = Ca + step
            vn, gn = value_grad_rows(space, X[idx], Bo, Cn)
            ok = vn < va - 1e-16 * scale[idx]
            upd = ok & ~improved
            C[idx[upd]] = Cn[upd]
            v[idx[upd]] = vn[upd]
            g[idx[upd]] = gn[upd]
            improved |= ok
            mu[idx[upd]] = np.maximum(mu[idx[upd]] * 0.3, 1e-12)
            mu[idx[~improved]] *= 10.0
            if improved.all():
                break
        gn_norm = np.linalg.norm(g[idx], axis=1)
        done = (gn_norm < 1e-13) | (~improved & (mu[idx] > 1e8))
        active[idx[done]] = False
        if it % 3 == 2:
            lo, _hi = _certificate(space, X[idx], Bo, C[idx], v[idx])
            active[idx[(v[idx] - lo) <= tol * np.maximum(1.0, v[idx])]] = False
    lo, hi = _certificate(space, X, Bo, C, v)
    coef = np.linalg.lstsq(B, (C @ Bo.T).T, rcond=None)[0].T
    return lo, hi, coef


def value_grad_rows(space, X, Bo, C):
    R = X - C @ Bo.T
    v, G = space.grad(R)
    return v, -(G @ Bo)


def _certificate(space, X, Bo, C, v):
    R = X - C @ Bo.T
    hi = space.norm_bounds(R)[1]
    _, G = space.grad(R)
    Gp = G - (G @ Bo) @ Bo.T
    dn = space.dual_space.norm_bounds(Gp)[1]
    with np.errstate(invalid="ignore", divide="ignore"):
        lo = np.where(dn > 0, np.abs(np.einsum("ij,ij->i", Gp, X)) / dn, 0.0)
    lo = np.minimum(np.maximum(lo, 0.0), hi)
    return lo, hi


# ---------------------------------------------------------------------------
# distances to balls and spheres of a subspace
# ---------------------------------------------------------------------------


def dist_segment(space, X, z, n_iter: int = 90):
    """Bounds on ``dist(x, [-z, z])`` for a single generator ``z``."""
    X = np.atleast_2d(X)
    nz = float(space.norm_bounds(z[None, :])[1][0])

    def f(t):
        return space.norm_bounds(X - t[:, None] * z[None, :])[1]

    a, c = _golden(f, np.full(X.shape[0], -1.0), np.full(X.shape[0], 1.0), n_iter)
    t = 0.5 * (a + c)
    lo_t, hi = space.norm_bounds(X - t[:, None] * z[None, :])
    lo = np.maximum(lo_t - nz * 0.5 * (c - a) - 1e-15, 0.0)
    return lo, hi


def dist_ball_lp(space, x, B) -> float:
    """Exact distance from ``x`` to the unit ball of ``span B`` (polyhedral)."""
    F = space.functionals
    B = np.asarray(B, dtype=float).reshape(space.dim, -1)
    k = B.shape[1]
    FB = F @ B
    Fx = F @ np.asarray(x, dtype=float)
    m = F.shape[0]
    ones = np.ones((m, 1))
    zeros = np.zeros((m, 1))
    A_ub = np.vstack([
        np.hstack([-FB, -ones]), np.hstack([FB, -ones]),
        np.hstack([FB, zeros]), np.hstack([-FB, zeros]),
    ])
    b_ub = np.concatenate([-Fx, Fx, np.ones(m), np.ones(m)])
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * (k + 1), method="highs")
    if res.status != 0:
        raise RuntimeError(f"ball distance LP failed: {res.message}")
    return float(res.x[-1])
