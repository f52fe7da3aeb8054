"""Named examples and gluing constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT, Config
from .distance import dist_ball_lp
from .norms import DirectSum, Lp, NormedSpace, Pullback, Quotient, from_functionals
from .openings import GapReport, omega
from .operators import lower_modulus, op_norm
from .subspaces import Subspace, sphere_net

# ---------------------------------------------------------------------------
# lines in l_1^2
# ---------------------------------------------------------------------------


def example_310(a: float, b: float):
    """Three lines of ``l_1^2`` on which the opening violates the triangle inequality.

    Returns
    -------
    (Lp, Subspace, Subspace, Subspace, tuple)
        The space, the lines ``y = 0``, ``y = a x``, ``y = b x`` and the exact
        openings ``(Theta(Y1, Y2), Theta(Y1, Y3), Theta(Y2, Y3))``.
    """
    if not 0 < a < b <= 1:
        raise ValueError("need 0 < a < b <= 1")
    X = Lp(1, 2)
    Y1 = Subspace(X, [[1.0], [0.0]])
    Y2 = Subspace(X, [[1.0], [a]])
    Y3 = Subspace(X, [[1.0], [b]])
    return X, Y1, Y2, Y3, (a, b, (b - a) / (1 + a))


@dataclass
class PairExample:
    """A pair of subspaces together with their annihilators."""

    primal: tuple[Subspace, Subspace]
    dual: tuple[Subspace, Subspace]
    expected: tuple[float, float]


def example_314(a: float) -> PairExample:
    """Lines in ``l_1^2`` whose spherical and ball openings do not dualise.

    ``expected`` holds ``Omega = Lambda`` for the primal pair and for the
    annihilators in ``l_inf^2``.
    """
    if not 0 < a < 1:
        raise ValueError("need 0 < a < 1")
    X, Xs = Lp(1, 2), Lp(np.inf, 2)
    Y = Subspace(X, [[1.0], [a]])
    Z = Subspace(X, [[1.0], [0.0]])
    Yp = Subspace(Xs, [[a], [-1.0]])
    Zp = Subspace(Xs, [[0.0], [1.0]])
    return PairExample((Y, Z), (Yp, Zp), (2 * a / (1 + a), a))


# ---------------------------------------------------------------------------
# close subspaces with far-apart geometry
# ---------------------------------------------------------------------------


@dataclass
class DouadyPair:
    """``G0 = Y + X/Y`` and ``Geps = {(eps x, q x)}`` inside ``X (+)_1 X/Y``."""

    ambient: DirectSum
    G0: Subspace
    Geps: Subspace
    tau: np.ndarray
    eps: float

    def tau_bounds(self, X: NormedSpace, cfg: Config = DEFAULT) -> tuple[float, float]:
        """Certified upper bounds on ``||tau||`` and ``||tau^{-1}||``."""
        up = op_norm(self.tau, X, self.ambient, cfg).upper
        lm = lower_modulus(self.tau, X, self.ambient, cfg).lower
        return up, (math.inf if lm <= 0 else 1.0 / lm)


def douady_pair(X: NormedSpace, Y: Subspace, eps: float) -> DouadyPair:
    """Build the pair of subspaces of ``X (+)_1 (X/Y)`` used for non-openness."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if Y.space is not X and Y.space.fingerprint() != X.fingerprint():
        raise ValueError("Y must be a subspace of X")
    Q = Quotient(X, Y.basis)
    d, m = X.dim, Q.dim
    amb = DirectSum([X, Q], 1)
    G0 = np.zeros((d + m, Y.dim + m))
    G0[:d, :Y.dim] = Y.basis
    G0[d:, Y.dim:] = np.eye(m)
    tau = np.vstack([eps * np.eye(d), Q.W.T])
    return DouadyPair(amb, Subspace(amb, G0), Subspace(amb, tau), tau, eps)


# ---------------------------------------------------------------------------
# coordinatewise power maps between spheres
# ---------------------------------------------------------------------------


@dataclass
class SphereMap:
    """Map between unit spheres with a certified modulus of continuity.

    ``modulus(eta)`` bounds ``||f(u) - f(v)||`` in the target norm whenever
    ``||u - v|| <= eta`` in the source norm and both lie on the sphere.
    """

    func: Callable[[np.ndarray], np.ndarray]
    source: NormedSpace
    target: NormedSpace
    modulus: Callable[[float], float]
    name: str = ""

    def __call__(self, X):
        return self.func(np.asarray(X, dtype=float))


def _power(s: float):
    def f(X):
        return np.sign(X) * np.abs(X) ** s
    return f


def identity_map(space: NormedSpace, target: NormedSpace | None = None) -> SphereMap:
    """The identity as a sphere map."""
    return SphereMap(lambda X: np.array(X, dtype=float), space, target or space, lambda e: e, "id")


def mazur_maps(p: float, n: int) -> tuple[SphereMap, SphereMap]:
    """Sphere maps ``l_2^n -> l_p^n`` and ``l_2^n -> l_q^n`` with ``1/p + 1/q = 1``.

    Both raise coordinates to a power with the sign kept, which carries unit
    vectors to unit vectors.
    """
    p = float(p)
    if not 1 <= p <= 2:
        raise ValueError("need 1 <= p <= 2")
    if n < 1:
        raise ValueError("need n >= 1")
    q = math.inf if p == 1 else p / (p - 1)
    sT = 2.0 / p
    sD = 0.0 if q == math.inf else 2.0 / q
    l2 = Lp(2, n)
    # power s >= 1 is s-Lipschitz on [-1, 1]; l_p <= n^(1/p - 1/2) l_2
    cT = sT * n ** (1.0 / p - 0.5)

    def modT(eta):
        return cT * eta

    def modD(eta):
        # |a|^s sgn a is (2^(1-s), s)-Hoelder for s <= 1
        return 2.0 ** (1 - sD) * eta ** sD if sD > 0 else 2.0

    T = SphereMap(_power(sT), l2, Lp(p, n), modT, f"mazur_{p:g}")
    D = SphereMap(_power(sD) if sD > 0 else np.sign, l2, Lp(q, n), modD, f"mazur_{q:g}")
    return T, D


# ---------------------------------------------------------------------------
# gluing along sphere maps
# ---------------------------------------------------------------------------


@dataclass
class KadetsReport:
    """Diagnostics of :func:`kadets_glue`."""

    kbound: float
    kbound_upper: float
    net_slack: float
    omega: GapReport
    isometry_error_y: float
    isometry_error_z: float
    n_points: int
    n_functionals: int


def _nested_net(S: Subspace, mesh: float, budget: int) -> tuple[np.ndarray, float]:
    """Union of sphere nets at meshes ``mesh * 2^j`` (nested under halving)."""
    pts, got = [], math.inf
    m = mesh
    levels = []
    while m <= 4.0:
        levels.append(m)
        m *= 2
    for m in reversed(levels):
        try:
            net = sphere_net(S, m, budget)
        except Exception:
            break
        pts.append(net.points)
        got = net.mesh
    if not pts:
        raise ValueError("net budget too small")
    return np.vstack(pts), got


def _sample_sphere(X: NormedSpace, n: int, seed: int) -> np.ndarray:
    P = np.random.default_rng(seed).normal(size=(n, X.dim))
    return P / X.norm(P)[:, None]


def kadets_glue(Y: NormedSpace, Z: NormedSpace, T: SphereMap, D: SphereMap,
                cfg: Config = DEFAULT, mesh: float | None = None, dual_mesh: float | None = None,
                n_random: int = 512, n_check: int = 1000, direct_omega: bool | None = None):
    """Glue ``Y`` and ``Z`` by the seminorm ``sup |y*(y) - (D y*)(z)|``.

    The sup runs over a net of ``S(Y*)``; the seminorm is divided by its
    zero space.

    Returns
    -------
    (NormedSpace, Subspace, Subspace, KadetsReport)
        ``kbound`` is the sup of ``|y*(y) - (D y*)(T y)|`` over the net pairs.
        ``kbound_upper`` adds the certified net slack and bounds the same sup
        over the full spheres.
    """
    n = Y.dim
    if Z.dim != n:
        raise ValueError("Y and Z must have equal dimension")
    if mesh is None:
        mesh = 0.02 if n <= 2 else 0.5
    if dual_mesh is None:
        dual_mesh = 0.02 if n <= 2 else 0.5
    budget = 20_000
    Ys = Subspace(Y, np.eye(n))
    Ds = Subspace(Y.dual_space, np.eye(n))
    Pn, eta = _nested_net(Ys, mesh, budget)
    Fn, eta_s = _nested_net(Ds, dual_mesh, budget)
    Pn = np.vstack([Pn, _sample_sphere(Y, n_random, cfg.seed)])
    Fn = np.vstack([Fn, _sample_sphere(Y.dual_space, n_random, cfg.seed + 1)])
    Pn = Pn / Y.norm(Pn)[:, None]
    Fn = Fn / Y.dual_norm(Fn)[:, None]
    TP, DF = T(Pn), D(Fn)
    if np.abs(Z.norm(TP) - 1).max() > 1e-9:
        raise ValueError("T does not map the net of S(Y) into S(Z)")
    if np.abs(Z.dual_norm(DF) - 1).max() > 1e-9:
        raise ValueError("D does not map the net of S(Y*) into S(Z*)")

    # quantity sup |y*(y) - (D y*)(T y)| over the nets
    kb = 0.0
    for s in range(0, Pn.shape[0], 2048):
        G = Fn @ Pn[s:s + 2048].T - DF @ TP[s:s + 2048].T
        kb = max(kb, float(np.abs(G).max()))
    kb_upper = kb + eta + T.modulus(eta) + eta_s + D.modulus(eta_s)

    Fmat = np.hstack([Fn, -DF])
    _, s, Vt = np.linalg.svd(Fmat, full_matrices=False)
    rank = int((s > 1e-10 * s[0]).sum())
    W = Vt[:rank].T
    X = from_functionals(Fmat @ W)
    imY = Subspace(X, W.T @ np.vstack([np.eye(n), np.zeros((n, n))]))
    imZ = Subspace(X, W.T @ np.vstack([np.zeros((n, n)), np.eye(n)]))

    rng = np.random.default_rng(cfg.seed + 2)
    ys, zs = rng.normal(size=(n_check, n)), rng.normal(size=(n_check, n))
    ey = float(np.max(np.abs(X.norm(ys @ imY.basis.T) / Y.norm(ys) - 1)))
    ez = float(np.max(np.abs(X.norm(zs @ imZ.basis.T) / Z.norm(zs) - 1)))

    # certified defects of the embedded unit spheres
    dY = eta_s
    dZ = D.modulus(eta_s)
    if dY < 1 and dZ < 1:
        slack = (kb_upper - kb) + max(dY / (1 - dY) + dZ, dZ / (1 - dZ) + dY)
    else:
        slack = math.inf
    # spheres are at distance at most 2
    slack = min(slack, 2.0)
    if direct_omega is None:
        direct_omega = n <= 2
    om_bound = min(2.0, kb + slack)
    if direct_omega:
        om = omega(imY, imZ, cfg)
        if om.upper > om_bound:
            om = GapReport(min(om.value, om_bound), om.lower, om_bound, om.method, om.mesh)
    else:
        om = GapReport(om_bound, 0.0, om_bound, _derived_method(), 0.0)
    rep = KadetsReport(kb, min(kb_upper, 2.0), slack, om, ey, ez, Pn.shape[0], Fn.shape[0])
    return X, imY, imZ, rep


def _derived_method():
    from .openings import Method
    return Method.CERTIFIED_NET


def kadets_bound(p: float) -> float:
    """``2 (2/p - 1)`` for ``1 < p <= 2``."""
    return 2.0 * (2.0 / p - 1.0)


# ---------------------------------------------------------------------------
# sup-norm identity on a grid
# ---------------------------------------------------------------------------


def grid_functions(eps: float, grid: int):
    """Grid values of ``h0`` and its extension ``w``.

    ``h0`` has norm one with finitely many values ``>= eps``; ``w`` agrees
    with ``h0`` there, equals one at a node where ``h0 = -eps`` and is zero
    elsewhere, so its piecewise-linear extension has sup one.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if grid < 8:
        raise ValueError("grid must have at least 8 nodes")
    h0 = np.zeros(grid)
    w = np.zeros(grid)
    big = np.arange(0, grid // 2, 2)
    h0[big] = np.linspace(1.0, eps, big.size)
    small = np.arange(1, grid // 2, 2)
    h0[small] = eps * np.linspace(0.9, -0.9, small.size)
    neg = grid - 2
    h0[neg] = -eps
    A = h0 >= eps
    w[A] = h0[A]
    w[neg] = 1.0
    return h0, w


def identity_642(eps: float, b: float, grid: int = 16) -> float:
    """Sup-norm of ``h0 - b w`` on the grid; equals ``max(1 - b, b + eps)``."""
    if not 0 <= b <= 1:
        raise ValueError("b must lie in [0, 1]")
    h0, w = grid_functions(eps, grid)
    val = float(np.abs(h0 - b * w).max())
    want = max(1 - b, b + eps)
    if abs(val - want) > 1e-12:
        raise RuntimeError(f"identity violated: {val} != {want}")
    return val


@dataclass
class Estimate642:
    """Witness distances in the finite truncation of the density example."""

    a: float
    y0_witness: float
    y1_witness: float
    z_norm: float
    f_norm: float
    y0_exact: float | None
    y1_exact: float | None
    expected: float


def truncated_space_642(N: int, grid: int, coef: float) -> Pullback:
    """``(h_0..h_N, g_1..g_N)`` with ``max(sum|h_i - c g_{i+1}|, sum|g_j - c h_j|)``.

    Each block is a grid function with the sup norm and ``g_{N+1} = 0``.
    """
    g = grid
    nh, ng = N + 1, N
    dim = (nh + ng) * g
    M = np.zeros((dim, dim))
    I = np.eye(g)
    for i in range(nh):
        M[i * g:(i + 1) * g, i * g:(i + 1) * g] = I
        if i + 1 <= ng:
            j = nh + i       # block of g_{i+1}
            M[i * g:(i + 1) * g, j * g:(j + 1) * g] = -coef * I
    for j in range(ng):
        r = (nh + j) * g
        M[r:r + g, r:r + g] = I
        hj = (j + 1) * g    # block of h_{j+1}
        M[r:r + g, hj:hj + g] = -coef * I
    blocks = DirectSum([Lp(np.inf, g)] * nh, 1), DirectSum([Lp(np.inf, g)] * ng, 1)
    return Pullback(DirectSum(list(blocks), np.inf), M)


def estimate_642(N: int = 2, grid: int = 8, exact: bool = True) -> Estimate642:
    """Witness bounds ``dist(y_i, B(Z)) <= 2 sqrt 2 - 2`` on a finite truncation."""
    if N < 2:
        raise ValueError("the witnesses need N >= 2")
    a = math.sqrt(2) - 1
    X = truncated_space_642(N, grid, a)
    g, nh = grid, N + 1
    h0, w = grid_functions(a, grid)
    dim = X.dim

    def vec(blocks: dict) -> np.ndarray:
        v = np.zeros(dim)
        for idx, val in blocks.items():
            v[idx * g:(idx + 1) * g] = val
        return v

    y0 = vec({0: h0})
    z = vec({nh: a * w})
    h1 = np.zeros(g)
    h1[0] = 1.0
    y1 = vec({1: h1})
    f = vec({nh + 1: a * h1})
    Zb = np.zeros((dim, N * g))
    Zb[nh * g:, :] = np.eye(N * g)
    y0e = y1e = None
    if exact:
        y0e = dist_ball_lp(X, y0, Zb)
        y1e = dist_ball_lp(X, y1, Zb)
    return Estimate642(a, float(X.norm(y0 + z)), float(X.norm(y1 + f)), float(X.norm(z)),
                       float(X.norm(f)), y0e, y1e, 2 * math.sqrt(2) - 2)


__all__ = ["example_310", "example_314", "PairExample", "douady_pair", "DouadyPair",
           "SphereMap", "identity_map", "mazur_maps", "kadets_glue", "KadetsReport",
           "kadets_bound", "identity_642", "grid_functions", "estimate_642",
           "truncated_space_642", "Estimate642"]
