"""Banach-Mazur distances of small spaces and the associated gluing construction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize
from scipy.stats import special_ortho_group

from .config import DEFAULT, Config
from .norms import DirectSum, Lp, NormedSpace, Pullback
from .operator_opening import r0_bounds
from .operators import Check, LinearMap, op_norm
from .polyhedral import PolyhedralTooLarge
from .subspaces import Subspace, certified_extremum, sphere_net

#: Largest dimension accepted by the multistart search.
MAX_BM_DIM = 4
DET_GUARD = 1e-8
#: Cap on the number of functionals generated for the glued norm.
GLUE_FUNCTIONALS = 8192


def _sphere_sample(X: NormedSpace, cfg: Config, n: int = 1024) -> np.ndarray:
    k = X.dim
    if k == 1:
        S = np.array([[1.0]])
    elif k == 2:
        t = np.linspace(0, np.pi, 720, endpoint=False)
        S = np.column_stack([np.cos(t), np.sin(t)])
    else:
        S = np.random.default_rng(cfg.seed).normal(size=(n, k))
    if X.is_polyhedral:
        try:
            S = np.vstack([S, X.ball_vertices])
        except PolyhedralTooLarge:
            pass
    return S / X.norm_bounds(S)[1][:, None]


def _starts(k: int, cfg: Config, seeds) -> list[np.ndarray]:
    out = [np.eye(k)]
    if k == 2:
        c = math.sqrt(0.5)
        out.append(np.array([[c, -c], [c, c]]))
    if seeds is not None:
        out.extend(np.asarray(s, dtype=float).reshape(k, k) for s in seeds)
    rng = np.random.default_rng(cfg.seed)
    n = max(0, min(cfg.restarts, 8) - len(out))
    for i in range(n):
        if k > 1 and i % 2 == 0:
            out.append(special_ortho_group.rvs(k, random_state=rng))
        else:
            out.append(rng.normal(size=(k, k)))
    return out


def _fast_norm(X: NormedSpace):
    """Vectorised norm, through the functional matrix when that is small."""
    if X.is_polyhedral:
        try:
            F = X.facet_functionals
            if F.shape[0] <= 20_000:
                Ft = np.ascontiguousarray(F.T)
                return lambda V: np.abs(V @ Ft).max(axis=1)
        except PolyhedralTooLarge:
            pass
    return lambda V: X.norm_bounds(V)[1]


def _certified_product(T, Y, Z, cfg) -> float:
    if abs(np.linalg.det(T)) < DET_GUARD:
        return math.inf
    return op_norm(T, Y, Z, cfg).upper * op_norm(np.linalg.inv(T), Z, Y, cfg).upper


def bm_search(Y: NormedSpace, Z: NormedSpace, cfg: Config = DEFAULT, seeds=None):
    """Best isomorphism ``T: Y -> Z`` found by multistart search.

    Returns
    -------
    (float, ndarray or None)
        Certified ``||T|| ||T^{-1}||`` and the operator; ``inf`` on a
        dimension mismatch.
    """
    if Y.dim != Z.dim:
        return math.inf, None
    k = Y.dim
    if k == 0:
        return 1.0, np.zeros((0, 0))
    if k > MAX_BM_DIM:
        raise ValueError(f"Banach-Mazur search supports dimension <= {MAX_BM_DIM}")
    if Y.fingerprint() == Z.fingerprint():
        return 1.0, np.eye(k)
    SY, SZ = _sphere_sample(Y, cfg), _sphere_sample(Z, cfg)
    nY, nZ = _fast_norm(Y), _fast_norm(Z)

    def f(x):
        T = x.reshape(k, k)
        d = np.linalg.det(T)
        if not np.isfinite(d) or abs(d) < DET_GUARD:
            return 1e6
        a = nZ(SY @ T.T).max()
        b = nY(SZ @ np.linalg.inv(T).T).max()
        return math.log(a) + math.log(b)

    runs = []
    for T0 in _starts(k, cfg, seeds):
        res = minimize(f, T0.ravel(), method="Nelder-Mead",
                       options={"maxiter": 200 * k * k, "xatol": 1e-10, "fatol": 1e-12})
        runs.append((res.fun, res.x.reshape(k, k)))
    runs.sort(key=lambda r: r[0])
    best, bestT = math.inf, None
    for _, T in runs[:3]:
        v = _certified_product(T, Y, Z, cfg)
        if v < best:
            best, bestT = v, T
    if bestT is not None and best > 1.0 + 1e-12:
        # polish on the certified objective itself; smooth norms make each
        # evaluation a branch-and-bound run, so their polish is kept short
        def g(x):
            return math.log(max(_certified_product(x.reshape(k, k), Y, Z, cfg), 1e-300))
        cheap = Y.is_polyhedral and Z.is_polyhedral
        evals = (80 if cheap else 12) * k * k
        res = minimize(g, bestT.ravel(), method="Nelder-Mead",
                       options={"maxiter": evals, "maxfev": evals, "xatol": 1e-10,
                                "fatol": 1e-12})
        v = _certified_product(res.x.reshape(k, k), Y, Z, cfg)
        if v < best:
            best, bestT = v, res.x.reshape(k, k)
    return max(best, 1.0), bestT


def bm_upper(Y: NormedSpace, Z: NormedSpace, cfg: Config = DEFAULT, seeds=None) -> float:
    """Upper bound on the Banach-Mazur distance ``inf ||T|| ||T^{-1}||``.

    The search is run in both directions, so the result is symmetric up to
    the search tolerance.  Dimension mismatch gives ``inf``.
    """
    if Y.dim != Z.dim:
        return math.inf
    a, _ = bm_search(Y, Z, cfg, seeds)
    inv = None if seeds is None else [np.linalg.inv(np.asarray(s, float)) for s in seeds]
    b, _ = bm_search(Z, Y, cfg, inv)
    return min(a, b)


# ---------------------------------------------------------------------------
# closeness in r0 implies closeness in d
# ---------------------------------------------------------------------------


@dataclass
class Prop61Report:
    """``d(Y, Z) <= (1 + u) / (1 - u)`` for ``u = r0(Y, Z)``."""

    u: float
    bound: float
    restricted: float
    bm: float
    check: Check


def prop61_bound(u: float) -> float:
    """``(1 + u) / (1 - u)``."""
    return (1 + u) / (1 - u)


def prop61_check(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT, tol: float = 1e-3) -> Prop61Report:
    """Check the Banach-Mazur estimate through the ``r0`` witness.

    ``C|_Y`` is expressed in the bases of ``Y`` and ``Z``; its norm product is
    a direct upper bound, and it also seeds :func:`bm_upper`.
    """
    rep = r0_bounds(Y, Z, cfg)
    u = rep.upper
    if rep.witness is None or u >= 1:
        return Prop61Report(u, math.inf, math.nan, math.nan, Check("skip"))
    bound = prop61_bound(u)
    T = np.linalg.lstsq(Z.basis, rep.witness @ Y.basis, rcond=None)[0]
    EY, EZ = Y.induced, Z.induced
    restricted = _certified_product(T, EY, EZ, cfg)
    bm = min(bm_upper(EY, EZ, cfg, seeds=[T]), restricted)
    ok = restricted <= bound + tol and bm <= bound + tol
    return Prop61Report(u, bound, restricted, bm, Check("pass" if ok else "fail", max(restricted, bm), bound))


# ---------------------------------------------------------------------------
# gluing two spaces along an isomorphism
# ---------------------------------------------------------------------------


@dataclass
class GlueReport:
    """Diagnostics of :func:`prop62_embed`."""

    u_inv_norm: float
    target: float
    kernel_dim: int
    isometry_error_y: float
    isometry_error_z: float
    omega_upper: float
    r0_upper: float
    check: Check


def _dual_directions(X: NormedSpace, count: int) -> np.ndarray:
    """Unit functionals whose sup recovers ``X``'s norm (exact if polyhedral)."""
    if X.is_polyhedral:
        try:
            return X.facet_functionals
        except PolyhedralTooLarge:
            pass
    k = X.dim
    if k == 1:
        W = np.array([[1.0]])
    elif k == 2:
        t = np.linspace(0, np.pi, count, endpoint=False)
        W = np.column_stack([np.cos(t), np.sin(t)])
    else:
        D = Subspace(X.dual_space, np.eye(k))
        mesh = 0.5
        net = sphere_net(D, mesh)
        while True:
            try:
                nxt = sphere_net(D, mesh / 2, budget=count)
            except Exception:
                break
            net, mesh = nxt, mesh / 2
        W = net.points
    return W / X.dual_norm(W)[:, None]


def glue_functionals(Y: NormedSpace, Z: NormedSpace, U: np.ndarray, count: int = GLUE_FUNCTIONALS):
    """Rows ``(U^T z* / ||U^T z*||, z*)`` for a family of unit ``z* in Z*``.

    The family joins the extreme functionals of ``Z`` with the preimages of
    the extreme functionals of ``Y`` so that both coordinate spaces embed
    isometrically.
    """
    half = max(count // 2, 16)
    Zs = _dual_directions(Z, half)
    Ys = _dual_directions(Y, half)
    Zs = np.vstack([Zs, np.linalg.solve(U.T, Ys.T).T])
    Zs = Zs / Z.dual_norm(Zs)[:, None]
    Fy = Zs @ U
    Fy = Fy / Y.dual_norm(Fy)[:, None]
    return Fy, Zs


def prop62_embed(Y: NormedSpace, Z: NormedSpace, U, eps: float, cfg: Config = DEFAULT,
                 n_check: int = 1000):
    """Glue ``Y`` and ``Z`` along ``U`` into one space where they are close.

    Parameters
    ----------
    U : LinearMap or (k, k) array
        Isomorphism ``Y -> Z``; it is rescaled to norm one.
    eps : float
        Positive slack allowed on top of ``||U^{-1}|| - 1`` for the spherical
        opening certificate.

    Returns
    -------
    (NormedSpace, Subspace, Subspace, GlueReport)
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    U = np.asarray(U.matrix if isinstance(U, LinearMap) else U, dtype=float)
    k = Y.dim
    if U.shape != (Z.dim, k) or Z.dim != k:
        raise ValueError("U must be a square map between spaces of equal dimension")
    if abs(np.linalg.det(U)) < DET_GUARD or np.linalg.matrix_rank(U) < k:
        raise ValueError("U is not invertible")
    U = U / op_norm(U, Y, Z, cfg).upper
    nu = op_norm(U, Y, Z, cfg)
    if abs(nu.upper - 1) > 1e-6 or abs(nu.lower - 1) > 1e-3:
        raise ValueError("U could not be normalised to norm one")
    Uinv = np.linalg.inv(U)
    m = op_norm(Uinv, Z, Y, cfg).upper

    Fy, Fz = glue_functionals(Y, Z, U)
    n = Fy.shape[0]
    M = np.block([[U, np.eye(k)], [Fy, Fz]])
    parent = DirectSum([Z, Lp(np.inf, n)], np.inf)
    # p(v) = 0 exactly on ker M
    _, s, Vt = np.linalg.svd(M)
    rank = int((s > 1e-10 * s[0]).sum())
    W = Vt[:rank].T
    X = Pullback(parent, M @ W)
    Yimg = Subspace(X, W.T @ np.vstack([np.eye(k), np.zeros((k, k))]))
    Zimg = Subspace(X, W.T @ np.vstack([np.zeros((k, k)), np.eye(k)]))

    rng = np.random.default_rng(cfg.seed)
    ys = rng.normal(size=(n_check, k))
    zs = rng.normal(size=(n_check, k))
    ey = float(np.max(np.abs(X.norm(ys @ Yimg.basis.T) - Y.norm(ys)) / Y.norm(ys)))
    ez = float(np.max(np.abs(X.norm(zs @ Zimg.basis.T) - Z.norm(zs)) / Z.norm(zs)))

    target = m - 1
    slack = min(eps, cfg.mesh_for(k))
    om = max(_witness_sup(Yimg, Zimg, U, Z, slack, m, cfg, target + slack),
             _witness_sup(Zimg, Yimg, Uinv, Y, slack, m, cfg, target + slack))
    # T - I factors as w -> (-U^{-1} w, w) after w = z + U y, and p(y, z) >= ||w||
    A = W.T @ np.vstack([-Uinv, np.eye(k)])
    r0u = op_norm(A, Z, X, cfg).upper
    ok = ey <= 1e-6 and ez <= 1e-6 and om <= target + slack + 1e-9 and r0u <= target + 1e-6
    rep = GlueReport(m, target, M.shape[1] - rank, ey, ez, om, r0u,
                     Check("pass" if ok else "fail", max(om - slack, r0u), target))
    return X, Yimg, Zimg, rep


def _witness_sup(A: Subspace, B: Subspace, V: np.ndarray, Bspace: NormedSpace,
                 target: float, m: float, cfg: Config, threshold: float) -> float:
    """Certified upper bound on ``sup_{a in S(A)} p(a - b(a))`` with ``b(a) = V a / ||V a||``.

    The enclosure width is ``target`` unless a coarser one already falls
    below ``threshold``.

    ``b(a)`` lies on ``S(B)`` because ``B`` is an isometric copy of ``Bspace``.
    """
    X = A.space
    pinvA = np.linalg.pinv(A.basis)

    def ev(P):
        c = P @ pinvA.T
        w = c @ V.T
        w = w / Bspace.norm(w)[:, None]
        lo, hi = X.norm_bounds(P - w @ B.basis.T)
        return lo, hi

    # a coarse enclosure usually clears the threshold already
    coarse = max(target, 0.25 * threshold)
    ext = certified_extremum(A, ev, coarse, "sup", lipschitz=1 + 2 * m, cfg=cfg)
    if ext.upper <= threshold or coarse <= target:
        return ext.upper
    return certified_extremum(A, ev, target, "sup", lipschitz=1 + 2 * m, cfg=cfg).upper


__all__ = ["bm_upper", "bm_search", "prop61_check", "prop61_bound", "Prop61Report",
           "prop62_embed", "GlueReport", "glue_functionals"]
