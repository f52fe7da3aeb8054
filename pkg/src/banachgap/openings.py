"""Openings between subspaces: Theta, Omega, Lambda and the inclination.

For subspaces ``Y, Z`` of a normed space ``X``:

* ``theta0(Y, Z) = sup_{y in S(Y)} dist(y, Z)``
* ``omega0(Y, Z) = sup_{y in S(Y)} dist(y, S(Z))``
* ``lambda0(Y, Z) = sup_{y in S(Y)} dist(y, B(Z))``
* ``inclination(Z, Y) = inf_{z in S(Z)} dist(z, Y)``

and the symmetric versions take the larger of the two directions.  Every
quantity is returned as a :class:`GapReport` holding a certified enclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .config import DEFAULT, BudgetExceeded, Config
from .distance import dist_ball_lp, dist_bounds, dist_segment
from .norms import INF, Lp, NormedSpace, WeightedLp
from .polyhedral import PolyhedralTooLarge
from .subspaces import Subspace, annihilator, certified_extremum, sphere_net

#: Relative padding applied to closed-form and polyhedral values.
EXACT_PAD = 1e-12


class Method(str, Enum):
    POLYHEDRAL_EXACT = "PolyhedralExact"
    CLOSED_FORM = "ClosedForm"
    CERTIFIED_NET = "CertifiedNet"
    MULTISTART = "Multistart"


_RANK = {Method.POLYHEDRAL_EXACT: 0, Method.CLOSED_FORM: 0, Method.CERTIFIED_NET: 1, Method.MULTISTART: 2}


@dataclass(frozen=True)
class GapReport:
    """Certified enclosure ``lower <= true value <= upper``."""

    value: float
    lower: float
    upper: float
    method: Method
    mesh: float = 0.0

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol

    def as_dict(self) -> dict:
        return {"value": self.value, "lower": self.lower, "upper": self.upper,
                "method": self.method.value, "mesh": self.mesh}


def exact(v: float, method: Method = Method.POLYHEDRAL_EXACT, lo: float = 0.0, hi: float = 1.0) -> GapReport:
    pad = EXACT_PAD * max(1.0, abs(v))
    v = min(max(v, lo), hi)
    return GapReport(v, max(lo, v - pad), min(hi, v + pad), method)


def enclosure(lower: float, upper: float, method: Method, mesh: float = 0.0,
              lo: float = 0.0, hi: float = 1.0) -> GapReport:
    lower = min(max(lower, lo), hi)
    upper = min(max(upper, lower), hi)
    return GapReport(0.5 * (lower + upper), lower, upper, method, mesh)


def combine_max(a: GapReport, b: GapReport) -> GapReport:
    """Enclosure of ``max(A, B)`` from enclosures of ``A`` and ``B``."""
    method = a.method if _RANK[a.method] >= _RANK[b.method] else b.method
    return GapReport(max(a.value, b.value), max(a.lower, b.lower), max(a.upper, b.upper),
                     method, max(a.mesh, b.mesh))


def _check_pair(Y: Subspace, Z: Subspace):
    if not Y.same_space(Z):
        raise ValueError("subspaces must live in the same normed space")


def _route(Y: Subspace, cfg: Config) -> str:
    X = Y.space
    if cfg.force_net:
        return "net"
    if X.is_euclidean:
        return "euclid"
    if X.is_polyhedral:
        return "poly"
    return "net"


def _euclid_frames(Y: Subspace, Z: Subspace):
    G = Y.space.factor
    QY = np.linalg.qr(G @ Y.basis)[0] if Y.dim else np.zeros((G.shape[0], 0))
    QZ = np.linalg.qr(G @ Z.basis)[0] if Z.dim else np.zeros((G.shape[0], 0))
    return QY, QZ


def _vertices_ambient(Y: Subspace) -> np.ndarray:
    """Vertices of ``B(Y)`` as ambient vectors (one per +- pair)."""
    return Y.induced.generators @ Y.basis.T


# ---------------------------------------------------------------------------
# Theta
# ---------------------------------------------------------------------------


def _dist_at(Z: Subspace, mesh: float):
    """Distance oracle whose solver tolerance is matched to the net mesh."""
    tol = max(1e-10, 0.02 * mesh)
    return lambda X: Z.dist(X, tol=tol)


def theta0(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> GapReport:
    """One-sided opening ``sup_{y in S(Y)} dist(y, Z)``."""
    _check_pair(Y, Z)
    if Y.dim == 0:
        return exact(0.0, Method.CLOSED_FORM)
    if Z.dim == 0:
        return exact(1.0, Method.CLOSED_FORM)
    if Z.dim == Z.ambient_dim:
        return exact(0.0, Method.CLOSED_FORM)
    route = _route(Y, cfg)
    if route == "euclid":
        QY, QZ = _euclid_frames(Y, Z)
        R = QY - QZ @ (QZ.T @ QY)
        return exact(float(np.linalg.norm(R, 2)), Method.CLOSED_FORM)
    if route == "poly":
        try:
            V = _vertices_ambient(Y)
            Q = Z.quotient
            v = float(np.abs((V @ Q.W) @ Q.functionals.T).max())
            return exact(v)
        except PolyhedralTooLarge:
            pass
    mesh = cfg.mesh_for(Y.dim)
    ext = certified_extremum(Y, _dist_at(Z, mesh), mesh, "sup", cfg=cfg)
    return enclosure(ext.lower, ext.upper, Method.CERTIFIED_NET, ext.mesh)


def theta(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> GapReport:
    """Symmetric opening ``max(theta0(Y, Z), theta0(Z, Y))``."""
    return combine_max(theta0(Y, Z, cfg), theta0(Z, Y, cfg))


def dg_metric(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> float:
    """``log(1 + theta(Y, Z))`` evaluated at the reported value."""
    return math.log1p(theta(Y, Z, cfg).value)


def hilbert_theta(Y: Subspace, Z: Subspace) -> float:
    """``|P_Y - P_Z|`` for orthogonal projections in a Euclidean space."""
    _check_pair(Y, Z)
    if not Y.space.is_euclidean:
        raise ValueError("hilbert_theta needs a Euclidean space")
    QY, QZ = _euclid_frames(Y, Z)
    D = QY @ QY.T - QZ @ QZ.T
    return float(np.linalg.norm(D, 2)) if D.size else 0.0


# ---------------------------------------------------------------------------
# distances to finite point clouds
# ---------------------------------------------------------------------------


class CloudIndex:
    """Nearest-point queries against a fixed finite point cloud.

    Points are mapped to a feature space in which the norm is a plain
    l_p norm and then searched by the compiled kernel.
    """

    def __init__(self, space: NormedSpace, C: np.ndarray):
        self.space = space
        self.map, self.p = _feature_map(space)
        self.C = C
        self.feats = None if self.map is None else self.map(C)

    def query(self, P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Distances to, and indices of, the nearest cloud points."""
        if self.map is None:
            out = np.empty(P.shape[0])
            arg = np.empty(P.shape[0], dtype=np.intp)
            for i, p in enumerate(P):
                d = self.space.norm_bounds(p[None, :] - self.C)[1]
                arg[i] = int(np.argmin(d))
                out[i] = d[arg[i]]
            return out, arg
        return kernels.row_min_lp(self.map(P), self.feats, self.p)


def _feature_map(space: NormedSpace):
    if isinstance(space, Lp):
        return (lambda A: A), space.p
    if isinstance(space, WeightedLp):
        w = space.weights
        return (lambda A: A * w), space.p
    if space.is_euclidean:
        G = space.factor
        return (lambda A: A @ G.T), 2.0
    if space._fast_polyhedral:
        F = space.functionals
        return (lambda A: A @ F.T), INF
    return None, None


def min_dist_to_cloud(space: NormedSpace, P: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``min_j ||p_i - c_j||`` for each row ``p_i``."""
    return CloudIndex(space, C).query(P)[0]


# ---------------------------------------------------------------------------
# Omega
# ---------------------------------------------------------------------------


def _dist_sphere_evaluator(Z: Subspace, eta: float, cfg: Config):
    X = Z.space
    if Z.dim == 1:
        z = Z.basis[:, 0] / X.norm_bounds(Z.basis[:, 0][None, :])[1][0]

        def ev(P):
            a = X.norm_bounds(P - z)
            b = X.norm_bounds(P + z)
            return np.minimum(a[0], b[0]), np.minimum(a[1], b[1])
        return ev
    net = sphere_net(Z, eta, cfg.budget)
    index = CloudIndex(X, net.points)

    def ev(P):
        m = index.query(P)[0]
        dlo, _ = Z.dist(P)
        return np.maximum(m - net.mesh, dlo), m
    return ev


def omega0(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> GapReport:
    """One-sided spherical opening ``sup_{y in S(Y)} dist(y, S(Z))``."""
    _check_pair(Y, Z)
    if Y.dim == 0 or Z.dim == 0 or Z.dim == Z.ambient_dim:
        return theta0(Y, Z, cfg)
    X = Y.space
    if _route(Y, cfg) == "euclid":
        QY, QZ = _euclid_frames(Y, Z)
        s = np.linalg.svd(QZ.T @ QY, compute_uv=False)
        smin = 0.0 if Y.dim > Z.dim else float(s.min())
        return exact(math.sqrt(max(0.0, 2.0 - 2.0 * min(1.0, smin))), Method.CLOSED_FORM, hi=2.0)
    if Y.dim == 1 and Z.dim == 1 and not cfg.force_net:
        y = Y.basis[:, 0] / X.norm(Y.basis[:, 0])
        z = Z.basis[:, 0] / X.norm(Z.basis[:, 0])
        lo1, hi1 = X.norm_bounds(np.vstack([y - z, y + z]))
        return enclosure(float(lo1.min()), float(hi1.min()), Method.CLOSED_FORM, hi=2.0)
    mesh = cfg.mesh_for(max(Y.dim, Z.dim))
    ev, eta = _affordable_sphere_evaluator(Z, mesh / 4, cfg)
    # the evaluator's bounds are eta apart, so the search cannot resolve below that
    target = mesh if eta <= mesh / 4 else mesh / 2 + 2 * eta
    ext = certified_extremum(Y, ev, target, "sup", cfg=cfg)
    th = theta0(Y, Z, cfg)
    return enclosure(max(ext.lower, th.lower), ext.upper, Method.CERTIFIED_NET, target, hi=2.0)


def _affordable_sphere_evaluator(Z: Subspace, eta: float, cfg: Config):
    """Sphere-distance evaluator with the finest net fitting half the budget."""
    half = cfg.with_(budget=max(cfg.budget // 2, 1))
    while True:
        try:
            return _dist_sphere_evaluator(Z, eta, half), eta
        except BudgetExceeded:
            if eta >= 0.5:
                raise
            eta *= 1.25


def omega(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> GapReport:
    """Hausdorff distance between the unit spheres of ``Y`` and ``Z``."""
    if Y.dim == 0 or Z.dim == 0:
        return theta(Y, Z, cfg)
    return combine_max(omega0(Y, Z, cfg), omega0(Z, Y, cfg))


# ---------------------------------------------------------------------------
# Lambda
# ---------------------------------------------------------------------------


def _dist_ball_evaluator(Z: Subspace, eta: float, cfg: Config):
    """Bounds on ``dist(y, B(Z))``.

    The upper bound is attained at a feasible point (a sphere-net point or
    an unconstrained minimiser inside the ball).  The lower bound is the
    larger of ``dist(y, Z)`` and the duality bound ``g(y) - sup g(B(Z))``
    for the norming functional ``g`` of the best feasible residual.
    """
    X = Z.space
    if Z.dim == 1:
        z = Z.basis[:, 0] / X.norm_bounds(Z.basis[:, 0][None, :])[1][0]

        def ev(P):
            return dist_segment(X, P, z)
        return ev
    if X.is_polyhedral:
        def ev(P):
            v = np.array([dist_ball_lp(X, p, Z.basis) for p in P])
            return v, v
        return ev
    net = sphere_net(Z, eta, cfg.budget)
    index = CloudIndex(X, net.points)
    dual = X.dual_space

    def ev(P):
        m, j = index.query(P)
        dlo, dhi, C = dist_bounds(X, P, Z.basis)
        hi = m.copy()
        best = net.points[j]
        if np.all(np.isfinite(C)):
            inner = C @ Z.basis.T
            feas = X.norm_bounds(inner)[1] <= 1.0
            take = feas & (dhi < m)
            hi[take] = dhi[take]
            best[take] = inner[take]
        _, G = X.grad(P - best)
        gn = np.maximum(dual.norm_bounds(G)[1], 1e-300)
        G = G / np.maximum(gn, 1.0)[:, None]
        gn = np.minimum(gn, 1.0)
        sigma = np.abs(G @ net.points.T).max(axis=1) + gn * net.mesh
        lo = np.maximum(dlo, np.einsum("ij,ij->i", G, P) - sigma)
        return np.minimum(lo, hi), hi
    return ev


def lambda0(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> GapReport:
    """One-sided opening ``sup_{y in S(Y)} dist(y, B(Z))``."""
    _check_pair(Y, Z)
    if Y.dim == 0 or Z.dim == 0 or Z.dim == Z.ambient_dim:
        return theta0(Y, Z, cfg)
    route = _route(Y, cfg)
    if route == "euclid":
        return theta0(Y, Z, cfg)
    if route == "poly":
        try:
            V = _vertices_ambient(Y)
            if V.shape[0] <= 5000:
                v = max(dist_ball_lp(Y.space, x, Z.basis) for x in V)
                return exact(v)
        except PolyhedralTooLarge:
            pass
    mesh = cfg.mesh_for(max(Y.dim, Z.dim))
    ev = _dist_ball_evaluator(Z, mesh / 4, cfg)
    ext = certified_extremum(Y, ev, mesh, "sup", cfg=cfg)
    th = theta0(Y, Z, cfg)
    return enclosure(max(ext.lower, th.lower), ext.upper, Method.CERTIFIED_NET, mesh)


def lambda_gap(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> GapReport:
    """Symmetric opening ``max(lambda0(Y, Z), lambda0(Z, Y))``."""
    if Y.dim == 0 or Z.dim == 0:
        return theta(Y, Z, cfg)
    return combine_max(lambda0(Y, Z, cfg), lambda0(Z, Y, cfg))


# ---------------------------------------------------------------------------
# inclination
# ---------------------------------------------------------------------------


def inclination(Z: Subspace, Y: Subspace, cfg: Config = DEFAULT) -> GapReport:
    """``dist(S(Z), Y) = inf_{z in S(Z)} dist(z, Y)``."""
    _check_pair(Y, Z)
    if Z.dim == 0:
        raise ValueError("the unit sphere of the zero subspace is empty")
    if Y.dim == 0:
        return exact(1.0, Method.CLOSED_FORM)
    route = _route(Z, cfg)
    if route == "euclid":
        QZ, QY = _euclid_frames(Z, Y)
        R = QZ - QY @ (QY.T @ QZ)
        s = np.linalg.svd(R, compute_uv=False)
        v = float(s.min()) if s.size == Z.dim else 0.0
        return exact(v, Method.CLOSED_FORM)
    if route == "poly":
        try:
            return exact(_inclination_lp(Z, Y))
        except PolyhedralTooLarge:
            pass
    mesh = cfg.mesh_for(Z.dim)
    ext = certified_extremum(Z, _dist_at(Y, mesh), mesh, "inf", cfg=cfg)
    return enclosure(ext.lower, ext.upper, Method.CERTIFIED_NET, ext.mesh)


def _inclination_lp(Z: Subspace, Y: Subspace) -> float:
    ZI = Z.induced
    FZ = ZI.functionals
    facets = ZI.facet_functionals
    Q = Y.quotient
    Psi = Q.functionals @ (Q.W.T @ Z.basis)
    k = Z.dim
    m1, m2 = Psi.shape[0], FZ.shape[0]
    best = math.inf
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    A_ub = np.vstack([
        np.hstack([Psi, -np.ones((m1, 1))]), np.hstack([-Psi, -np.ones((m1, 1))]),
        np.hstack([FZ, np.zeros((m2, 1))]), np.hstack([-FZ, np.zeros((m2, 1))]),
    ])
    b_ub = np.concatenate([np.zeros(2 * m1), np.ones(2 * m2)])
    for phi in facets:
        res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=np.append(phi, 0.0)[None, :], b_eq=[1.0],
                      bounds=[(None, None)] * (k + 1), method="highs")
        if res.status == 0:
            best = min(best, float(res.fun))
    return best


# ---------------------------------------------------------------------------
# duality and Borsuk-type extremal points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualityReport:
    """Primal versus annihilator openings."""

    theta_primal: GapReport
    theta_dual: GapReport
    consistent: bool
    omega_primal: GapReport | None = None
    omega_dual: GapReport | None = None
    lambda_primal: GapReport | None = None
    lambda_dual: GapReport | None = None


def duality_check(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT,
                  spherical: bool = False) -> DualityReport:
    """Compare ``theta0(Y, Z)`` with ``theta0(Z^perp, Y^perp)``.

    With ``spherical=True`` the symmetric Omega and Lambda openings of the
    primal pair and of the annihilator pair are reported as well; those
    need not agree.
    """
    _check_pair(Y, Z)
    Yp, Zp = annihilator(Y), annihilator(Z)
    a = theta0(Y, Z, cfg)
    b = theta0(Zp, Yp, cfg)
    ok = a.lower <= b.upper + cfg.tol and b.lower <= a.upper + cfg.tol
    if not spherical:
        return DualityReport(a, b, ok)
    return DualityReport(a, b, ok, omega(Y, Z, cfg), omega(Yp, Zp, cfg),
                         lambda_gap(Y, Z, cfg), lambda_gap(Yp, Zp, cfg))


def borsuk_extremal(Y: Subspace, Z: Subspace, cfg: Config = DEFAULT) -> tuple[np.ndarray, GapReport]:
    """A point of ``S(Y)`` at (nearly) maximal distance from ``Z``.

    Requires ``dim Y > dim Z``; the supremum then equals one.
    """
    _check_pair(Y, Z)
    if Y.dim <= Z.dim:
        raise ValueError("need dim Y > dim Z")
    X = Y.space
    if Z.dim == 0:
        y = Y.basis[:, 0] / X.norm(Y.basis[:, 0])
        return y, exact(1.0, Method.CLOSED_FORM)
    route = _route(Y, cfg)
    if route == "euclid":
        QY, QZ = _euclid_frames(Y, Z)
        R = QY - QZ @ (QZ.T @ QY)
        _, s, Vt = np.linalg.svd(R)
        y = np.linalg.pinv(X.factor) @ (QY @ Vt[0])
        y /= X.norm(y)
        return y, exact(float(s[0]), Method.CLOSED_FORM)
    if route == "poly":
        V = _vertices_ambient(Y)
        d = Z.dist(V)[1]
        i = int(np.argmax(d))
        return V[i] / X.norm(V[i]), exact(float(d[i]))
    mesh = cfg.mesh_for(Y.dim)
    ext = certified_extremum(Y, _dist_at(Z, mesh), mesh, "sup", cfg=cfg)
    return ext.point, enclosure(ext.lower, ext.upper, Method.CERTIFIED_NET, ext.mesh)


__all__ = [
    "GapReport", "Method", "DualityReport", "theta0", "theta", "omega0", "omega",
    "lambda0", "lambda_gap", "inclination", "dg_metric", "hilbert_theta",
    "duality_check", "borsuk_extremal", "min_dist_to_cloud", "INF",
]
