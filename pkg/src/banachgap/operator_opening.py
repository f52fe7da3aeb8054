"""Operator opening ``r0(Y, Z) = inf{||C - I|| : C invertible, C(Y) = Z}``.

Every operator with ``C(Y) = Z`` is written as ``C = [B_Z M, F] S^{-1}``
where ``S = [B_Y, E]`` completes a basis of ``Y``.  The map
``(M, F) -> C - I`` is affine, and ``||C - I|| < 1`` already forces ``C`` to
be invertible, so for polyhedral norms ``min(1, r0)`` is the value of a
single linear programme.  Other norms use projection witnesses refined by
a convex multistart search, and are reported as enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linprog, minimize

from .config import DEFAULT, Config
from .openings import Method, omega, theta0
from .operators import Check, Interval, op_norm
from .polyhedral import PolyhedralTooLarge
from .subspaces import Subspace

#: Largest LP (rows) attempted before falling back to the search route.
LP_ROW_CAP = 400_000


@dataclass(frozen=True)
class OperatorGapReport:
    """Enclosure of ``r0`` with an optional witness ``C``."""

    lower: float
    upper: float
    witness: np.ndarray | None
    method: Method

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def as_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "method": self.method.value,
                "witness": None if self.witness is None else self.witness.tolist()}


def _polyhedral_data(X):
    F = X.facet_functionals
    V = X.ball_vertices
    if 2 * F.shape[0] * V.shape[0] > LP_ROW_CAP:
        raise PolyhedralTooLarge("operator-norm LP too large")
    return F, V


def _frame(Y: Subspace, Z: Subspace):
    d, k = Y.ambient_dim, Y.dim
    E = sla.null_space(Y.basis.T) if k < d else np.zeros((d, 0))
    S = np.hstack([Y.basis, E])
    Sinv = np.linalg.inv(S)
    return E, Sinv[:k], Sinv[k:]


def _compose(Y, Z, M, F, R1, R2):
    return Z.basis @ M @ R1 + F @ R2


def _r0_lp(Y: Subspace, Z: Subspace):
    """Exact ``min ||C - I||`` over operators mapping ``Y`` into ``Z``."""
    X = Y.space
    F, V = _polyhedral_data(X)
    d, k = X.dim, Y.dim
    E, R1, R2 = _frame(Y, Z)
    FB = F @ Z.basis            # (nf, k)
    RV1 = V @ R1.T              # (nv, k)
    RV2 = V @ R2.T              # (nv, d-k)
    # row (i, j): phi_i^T (B_Z M R1 + F R2 - I) v_j
    coefM = np.einsum("ia,jb->ijab", FB, RV1).reshape(F.shape[0] * V.shape[0], k * k)
    coefF = np.einsum("ia,jb->ijab", F, RV2).reshape(F.shape[0] * V.shape[0], d * (d - k))
    const = (F @ V.T).reshape(-1)
    G = np.hstack([coefM, coefF])
    nvar = G.shape[1]
    ones = np.ones((G.shape[0], 1))
    A_ub = np.vstack([np.hstack([G, -ones]), np.hstack([-G, -ones])])
    b_ub = np.concatenate([const, -const])
    cost = np.zeros(nvar + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * (nvar + 1), method="highs")
    if res.status != 0:
        raise RuntimeError(f"operator-opening LP failed: {res.message}")
    M = res.x[:k * k].reshape(k, k)
    Fm = res.x[k * k:nvar].reshape(d, d - k)
    return float(res.fun), _compose(Y, Z, M, Fm, R1, R2)


def _g_projection(X, B):
    """Projection onto ``span B`` orthogonal in the Euclidean structure ``G``."""
    G = X.factor if X.is_euclidean else np.eye(X.dim)
    GtG = G.T @ G
    return B @ np.linalg.solve(B.T @ GtG @ B, B.T @ GtG)


def _projection_along(B, U):
    """Projection onto ``span B`` with kernel ``span U`` (complementary)."""
    L = sla.null_space(U.T) if U.shape[1] else np.eye(B.shape[0])
    return B @ np.linalg.solve(L.T @ B, L.T)


def projection_candidates(Y: Subspace, Z: Subspace) -> list[np.ndarray]:
    """Operators ``I - P_Y + P_Z`` for several common kernels."""
    X = Y.space
    d = X.dim
    out = []
    out.append(np.eye(d) - _g_projection(X, Y.basis) + _g_projection(X, Z.basis))
    for B in (Y.basis, Z.basis):
        U = sla.null_space(B.T) if B.shape[1] < d else np.zeros((d, 0))
        try:
            PY = _projection_along(Y.basis, U)
            PZ = _projection_along(Z.basis, U)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.isfinite(PY)) and np.all(np.isfinite(PZ)):
            out.append(np.eye(d) - PY + PZ)
    return out


def _sampled_norm_factory(X, cfg: Config, n: int = 384):
    rng = np.random.default_rng(cfg.seed)
    S = rng.normal(size=(n, X.dim))
    S /= X.norm_bounds(S)[1][:, None]
    if X.is_polyhedral:
        try:
            S = np.vstack([S, X.ball_vertices])
        except PolyhedralTooLarge:
            pass

    def f(A):
        return float(X.norm_bounds(S @ A.T)[1].max())
    return f


def r0_bounds(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> OperatorGapReport:
    """Enclosure of the one-sided operator opening ``r0(Y, Z)``."""
    if not Y.same_space(Z):
        raise ValueError("subspaces must live in the same normed space")
    X = Y.space
    th = theta0(Y, Z, cfg)
    if Y.dim != Z.dim:
        return OperatorGapReport(min(1.0, max(th.lower, 0.0)), 1.0, None, th.method)
    d, k = X.dim, Y.dim
    if k == 0 or k == d:
        return OperatorGapReport(0.0, 0.0, np.eye(d), Method.CLOSED_FORM)
    if X.is_euclidean and not cfg.force_net:
        C = np.eye(d) - _g_projection(X, Y.basis) + _g_projection(X, Z.basis)
        u = op_norm(C - np.eye(d), X, X, cfg).upper
        if u < 1:
            return OperatorGapReport(min(th.lower, u), max(u, th.upper), C, Method.CLOSED_FORM)
        return OperatorGapReport(th.lower, 1.0, None, Method.CLOSED_FORM)
    if X.is_polyhedral:
        try:
            t, C = _r0_lp(Y, Z)
            if t < 1:
                u = op_norm(C - np.eye(d), X, X, cfg).upper
                lo = max(th.lower, t - 1e-9)
                return OperatorGapReport(min(lo, u), u, C, Method.POLYHEDRAL_EXACT)
            return OperatorGapReport(1.0, 1.0, None, Method.POLYHEDRAL_EXACT)
        except PolyhedralTooLarge:
            pass
    return _r0_search(Y, Z, th, cfg)


def _r0_search(Y, Z, th, cfg: Config) -> OperatorGapReport:
    X = Y.space
    d, k = X.dim, Y.dim
    I = np.eye(d)
    E, R1, R2 = _frame(Y, Z)
    f = _sampled_norm_factory(X, cfg)
    Bz_pinv = np.linalg.pinv(Z.basis)

    def params(C):
        return np.concatenate([(Bz_pinv @ C @ Y.basis).ravel(), (C @ E).ravel()])

    def build(x):
        return _compose(Y, Z, x[:k * k].reshape(k, k), x[k * k:].reshape(d, d - k), R1, R2)

    def obj(x):
        return f(build(x) - I)

    starts = [params(C) for C in projection_candidates(Y, Z)]
    starts.sort(key=obj)
    rng = np.random.default_rng(cfg.seed)
    n_extra = max(0, min(cfg.restarts, 8) - len(starts))
    for _ in range(n_extra):
        starts.append(starts[0] + 0.1 * rng.normal(size=starts[0].size))
    best_x, best_v = None, math.inf
    for x0 in starts:
        res = minimize(obj, x0, method="Nelder-Mead",
                       options={"maxiter": 400 * x0.size, "xatol": 1e-9, "fatol": 1e-11})
        if res.fun < best_v:
            best_x, best_v = res.x, res.fun
    C = build(best_x)
    u = op_norm(C - I, X, X, cfg).upper
    if u < 1:
        return OperatorGapReport(min(th.lower, u), u, C, Method.MULTISTART)
    return OperatorGapReport(th.lower, 1.0, None, Method.MULTISTART)


def r_bounds(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> OperatorGapReport:
    """Symmetric operator opening ``max(r0(Y, Z), r0(Z, Y))``."""
    a, b = r0_bounds(Y, Z, cfg), r0_bounds(Z, Y, cfg)
    w = a.witness if a.upper >= b.upper else b.witness
    method = a.method if a.method != Method.POLYHEDRAL_EXACT else b.method
    return OperatorGapReport(max(a.lower, b.lower), max(a.upper, b.upper), w, method)


def dop_metric(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> float:
    """``log(1 + r(Y, Z))`` at the certified upper bound."""
    return math.log1p(r_bounds(Y, Z, cfg).upper)


# ---------------------------------------------------------------------------
# inverse estimate
# ---------------------------------------------------------------------------


@dataclass
class InverseBoundReport:
    """``||C^{-1} - I|| <= u / (1 - u)`` for a witness with ``||C - I|| <= u``."""

    u: float
    inverse_gap: Interval | None
    bound: float
    check: Check


def check_inverse_bound(C, X, cfg: Config = DEFAULT) -> InverseBoundReport:
    """Verify the inverse estimate for an explicit operator ``C``."""
    C = np.asarray(C, dtype=float)
    I = np.eye(X.dim)
    u = op_norm(C - I, X, X, cfg).upper
    if u >= 1:
        return InverseBoundReport(u, None, math.inf, Check("skip"))
    inv = op_norm(np.linalg.inv(C) - I, X, X, cfg)
    bound = u / (1 - u)
    ok = inv.lower <= bound + cfg.tol * 10
    return InverseBoundReport(u, inv, bound, Check("pass" if ok else "fail", inv.lower, bound))


def inverse_bound_check(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> InverseBoundReport:
    """Inverse estimate for the witness returned by :func:`r0_bounds`.

    The witness maps ``Y`` onto ``Z``, so its inverse maps ``Z`` onto ``Y``
    and ``r0(Z, Y) <= r0(Y, Z) / (1 - r0(Y, Z))`` follows.
    """
    rep = r0_bounds(Y, Z, cfg)
    if rep.witness is None or rep.upper >= 1:
        return InverseBoundReport(rep.upper, None, math.inf, Check("skip"))
    return check_inverse_bound(rep.witness, Y.space, cfg)


# ---------------------------------------------------------------------------
# projection constants
# ---------------------------------------------------------------------------


def _projection_frame(Y: Subspace):
    B = Y.basis
    R0 = np.linalg.pinv(B)
    N = sla.null_space(B.T)
    return B, R0, N


def _lambda_lp(Y: Subspace):
    X = Y.space
    F, V = _polyhedral_data(X)
    B, R0, N = _projection_frame(Y)
    k, m = B.shape[1], N.shape[1]
    FB = F @ B
    coef = np.einsum("ia,jb->ijab", FB, V @ N).reshape(F.shape[0] * V.shape[0], k * m)
    const = (FB @ R0 @ V.T).reshape(-1)
    ones = np.ones((coef.shape[0], 1))
    A_ub = np.vstack([np.hstack([coef, -ones]), np.hstack([-coef, -ones])])
    b_ub = np.concatenate([-const, const])
    cost = np.zeros(k * m + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * (k * m + 1), method="highs")
    if res.status != 0:
        raise RuntimeError(f"projection LP failed: {res.message}")
    T = res.x[:-1].reshape(k, m)
    return float(res.fun), B @ (R0 + T @ N.T)


def minimal_projection(Y: Subspace, cfg: Config = DEFAULT) -> tuple[Interval, np.ndarray]:
    """Enclosure of ``lambda(Y, X)`` and a projection attaining the upper bound."""
    X = Y.space
    d, k = X.dim, Y.dim
    if k == 0:
        return Interval(0.0, 0.0), np.zeros((d, d))
    if k == d:
        return Interval(1.0, 1.0), np.eye(d)
    if X.is_euclidean:
        return Interval(1.0, 1.0 + 1e-12), _g_projection(X, Y.basis)
    if X.is_polyhedral:
        try:
            t, P = _lambda_lp(Y)
            u = op_norm(P, X, X, cfg).upper
            return Interval(max(1.0, t - 1e-9), max(u, 1.0)), P
        except PolyhedralTooLarge:
            pass
    B, R0, N = _projection_frame(Y)
    k, m = B.shape[1], N.shape[1]
    f = _sampled_norm_factory(X, cfg)

    def build(x):
        return B @ (R0 + x.reshape(k, m) @ N.T)

    best = None
    P0 = _g_projection(X, B)
    x0s = [np.zeros(k * m), ((R0 @ P0 - R0) @ N).ravel()]
    for x0 in x0s:
        res = minimize(lambda x: f(build(x)), x0, method="Nelder-Mead",
                       options={"maxiter": 400 * max(1, x0.size), "xatol": 1e-9, "fatol": 1e-11})
        if best is None or res.fun < best.fun:
            best = res
    P = build(best.x)
    u = op_norm(P, X, X, cfg).upper
    return Interval(1.0, max(1.0, u)), P


def lambda_proj(Y: Subspace, cfg: Config = DEFAULT) -> Interval:
    """Enclosure of the relative projection constant ``lambda(Y, X)``."""
    return minimal_projection(Y, cfg)[0]


@dataclass
class Prop53Report:
    """Projection-constant estimate for ``r0(Y, Z)``."""

    lam: float
    omega: float
    bound: float
    r0_upper: float
    witness_norm: float
    check: Check


def prop53_bound(lam: float, om: float) -> float:
    """``lam om (1 + lam - om lam) / (1 - om lam)`` for ``om lam < 1``."""
    return lam * om * (1 + lam - om * lam) / (1 - om * lam)


def prop53_check(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> Prop53Report:
    """Check ``r0(Y, Z) <= bound(lambda(Y, X), Omega(Z, Y))``.

    Besides the generic enclosure of ``r0`` the explicit witness
    ``I - P_Y + P_Z`` is evaluated, where ``P_Y`` is a minimal projection and
    ``P_Z`` projects onto ``Z`` along ``ker P_Y``.
    """
    lam_iv, PY = minimal_projection(Y, cfg)
    om = omega(Z, Y, cfg).upper
    lam = lam_iv.upper
    if om * lam >= 1:
        return Prop53Report(lam, om, math.inf, math.nan, math.nan, Check("skip"))
    bound = prop53_bound(lam, om)
    d = Y.ambient_dim
    U = sla.null_space(PY) if Y.dim < d else np.zeros((d, 0))
    try:
        PZ = _projection_along(Z.basis, U)
        wit = op_norm(PY - PZ, Y.space, Y.space, cfg).upper
    except np.linalg.LinAlgError:
        wit = math.inf
    r0u = min(r0_bounds(Y, Z, cfg).upper, wit)
    ok = r0u <= bound + 1e-6
    return Prop53Report(lam, om, bound, r0u, wit, Check("pass" if ok else "fail", r0u, bound))


__all__ = ["OperatorGapReport", "r0_bounds", "r_bounds", "dop_metric", "inverse_bound_check",
           "check_inverse_bound", "InverseBoundReport", "lambda_proj", "minimal_projection",
           "prop53_check", "prop53_bound", "Prop53Report", "projection_candidates"]
