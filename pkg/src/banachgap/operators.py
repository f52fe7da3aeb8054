"""Linear maps between normed spaces: norms, moduli and perturbation checks.

The reduced minimum modulus of ``T`` is
``gamma(T) = sup{c : ||T x|| >= c dist(x, ker T)}``, i.e. the lower modulus
of the induced injective map on ``X / ker T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linprog

from .config import DEFAULT, Config
from .norms import DirectSum, Lp, NormedSpace, Pullback, Quotient, _pnorm_rows
from .polyhedral import PolyhedralTooLarge
from .subspaces import Subspace, certified_extremum


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lower, upper]``; ``upper`` may be ``inf``."""

    lower: float
    upper: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= x <= self.upper + tol


@dataclass
class LinearMap:
    """Matrix ``A`` acting from ``domain`` to ``codomain``."""

    matrix: np.ndarray
    domain: NormedSpace
    codomain: NormedSpace

    def __post_init__(self):
        self.matrix = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        if self.matrix.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(
                f"matrix shape {self.matrix.shape} does not match "
                f"({self.codomain.dim}, {self.domain.dim})")

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.matrix.T

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(self.matrix - other.matrix, self.domain, self.codomain)

    def kernel_basis(self, rtol: float = 1e-10) -> np.ndarray:
        return _kernel(self.matrix, rtol)

    def image_basis(self, rtol: float = 1e-10) -> np.ndarray:
        U, s, _ = np.linalg.svd(self.matrix)
        r = int((s > rtol * max(1.0, s.max() if s.size else 0.0)).sum())
        return U[:, :r]

    def kernel(self) -> Subspace:
        return Subspace(self.domain, self.kernel_basis())

    def image(self) -> Subspace:
        return Subspace(self.codomain, self.image_basis())

    def norm(self, cfg: Config = DEFAULT) -> Interval:
        return op_norm(self.matrix, self.domain, self.codomain, cfg)


def _kernel(A: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    if A.size == 0:
        return np.eye(A.shape[1])
    _, s, Vt = np.linalg.svd(A)
    smax = s.max() if s.size else 0.0
    r = int((s > rtol * max(1.0, smax)).sum()) if smax > 0 else 0
    return Vt[r:].T


def _exact_norm(space: NormedSpace) -> bool:
    """Whether ``space.norm`` is evaluated without iteration."""
    if space.is_euclidean or space._fast_polyhedral:
        return True
    if isinstance(space, Quotient):
        return False
    if isinstance(space, Pullback):
        return _exact_norm(space.parent)
    if isinstance(space, DirectSum):
        return all(_exact_norm(s) for s in space.summands)
    if hasattr(space, "resolved"):
        return _exact_norm(space.resolved)
    return True


def _euclid_matrix(A, dom, cod):
    """Matrix of ``A`` between the Euclidean coordinates of ``dom`` and ``cod``."""
    R = np.linalg.qr(dom.factor, mode="r")
    return cod.factor @ A @ np.linalg.inv(R)


def _sum_blocks(cod: NormedSpace):
    """Split a direct-sum codomain (possibly behind a pullback) into blocks."""
    M = None
    S = cod
    if isinstance(S, Pullback) and isinstance(S.parent, DirectSum):
        M = S.matrix
        S = S.parent
    if not isinstance(S, DirectSum):
        return None
    rows = []
    for i, s in enumerate(S.summands):
        sl = slice(S.offsets[i], S.offsets[i + 1])
        rows.append((s, sl))
    return S.p, M, rows


def _same(a: NormedSpace, b: NormedSpace) -> bool:
    return a is b or (a.dim == b.dim and a.fingerprint() == b.fingerprint())


def _structural_norm(A, dom: NormedSpace, cod: NormedSpace) -> float | None:
    """Exact norms of scalar multiples of the identity and of quotient maps."""
    c = float(A[0, 0])
    if A.shape == (dom.dim, dom.dim) and np.array_equal(A, c * np.eye(dom.dim)) and _same(dom, cod):
        return abs(c)
    if isinstance(cod, Quotient) and _same(cod.parent, dom) and np.array_equal(A, cod.W.T):
        return 1.0
    return None


def op_norm(A, dom: NormedSpace, cod: NormedSpace, cfg: Config = DEFAULT) -> Interval:
    """Enclosure of ``sup_{||x|| = 1} ||A x||``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.any(A):
        return Interval(0.0, 0.0)
    v = _structural_norm(A, dom, cod)
    if v is not None:
        return Interval(v, v)
    if dom.is_euclidean and cod.is_euclidean:
        v = float(np.linalg.norm(_euclid_matrix(A, dom, cod), 2))
        return Interval(v * (1 - 1e-12), v * (1 + 1e-12))
    # blockwise bound on a direct-sum codomain; exact on structured blocks
    upper = math.inf
    blocks = _sum_blocks(cod)
    if blocks is not None:
        p, M, rows = blocks
        AM = A if M is None else M @ A
        parts = [op_norm(AM[sl], dom, s, cfg).upper for s, sl in rows]
        upper = float(_pnorm_rows(np.array([parts]), p)[0])

    def clip(lo, hi):
        hi = min(float(hi), upper)
        return Interval(min(float(lo), hi), hi)

    if dom.is_polyhedral:
        try:
            V = dom.ball_vertices
            if V.shape[0] <= 50_000 and _exact_norm(cod):
                lo, hi = cod.norm_bounds(V @ A.T)
                return clip(lo.max(), hi.max())
        except PolyhedralTooLarge:
            pass
    if cod.is_polyhedral:
        try:
            F = cod.facet_functionals
            D = dom.dual_space
            if F.shape[0] <= 50_000 and _exact_norm(D):
                lo, hi = D.norm_bounds(F @ A)
                return clip(lo.max(), hi.max())
        except PolyhedralTooLarge:
            pass
    lo, hi = _net_sup(A, dom, cod, cfg, min(upper, _lipschitz(A, dom, cod)))
    return Interval(lo, min(upper, hi))


def _lipschitz(A, dom, cod) -> float:
    a, _ = dom.equivalence
    _, b = cod.equivalence
    return b * float(np.linalg.norm(A, 2)) / a


def _net_extremum(A, dom, cod, cfg, mode, L=None):
    whole = Subspace(dom, np.eye(dom.dim))
    L = _lipschitz(A, dom, cod) if L is None else L

    def ev(P):
        return cod.norm_bounds(P @ A.T)

    # target relative to a sampled scale of the map
    rng = np.random.default_rng(cfg.seed)
    S = rng.normal(size=(64, dom.dim))
    S /= dom.norm_bounds(S)[1][:, None]
    scale = float(cod.norm_bounds(S @ A.T)[1].max())
    target = cfg.mesh_for(dom.dim) * max(scale, 1e-12)
    ext = certified_extremum(whole, ev, target, mode, lipschitz=L, cfg=cfg)
    return ext.lower, ext.upper


def _net_sup(A, dom, cod, cfg, L=None):
    return _net_extremum(A, dom, cod, cfg, "sup", L)


def _net_inf(A, dom, cod, cfg, L=None):
    return _net_extremum(A, dom, cod, cfg, "inf", L)


def lower_modulus(A, dom: NormedSpace, cod: NormedSpace, cfg: Config = DEFAULT) -> Interval:
    """Enclosure of ``inf_{||x|| = 1} ||A x||``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if dom.dim == 0:
        return Interval(math.inf, math.inf)
    if np.linalg.matrix_rank(A) < dom.dim:
        return Interval(0.0, 0.0)
    c = float(A[0, 0])
    if A.shape == (dom.dim, dom.dim) and np.array_equal(A, c * np.eye(dom.dim)) and _same(dom, cod):
        return Interval(abs(c), abs(c))
    if dom.is_euclidean and cod.is_euclidean:
        v = float(np.linalg.svd(_euclid_matrix(A, dom, cod), compute_uv=False).min())
        return Interval(v * (1 - 1e-12), v * (1 + 1e-12))
    lower = 0.0
    blocks = _sum_blocks(cod)
    if blocks is not None:
        p, M, rows = blocks
        AM = A if M is None else M @ A
        parts = []
        for s, sl in rows:
            Aj = AM[sl]
            parts.append(0.0 if np.linalg.matrix_rank(Aj) < dom.dim
                         else lower_modulus(Aj, dom, s, cfg).lower)
        lower = float(_pnorm_rows(np.array([parts]), p)[0])
    if dom.is_polyhedral and cod.is_polyhedral:
        try:
            v = _lower_modulus_lp(A, dom, cod)
            return Interval(max(v * (1 - 1e-9), lower), max(v * (1 + 1e-9), lower))
        except PolyhedralTooLarge:
            pass
    L = op_norm(A, dom, cod, cfg).upper
    lo, hi = _net_inf(A, dom, cod, cfg, L)
    return Interval(max(lower, lo), hi)


def _lower_modulus_lp(A, dom, cod) -> float:
    """Minimise ``||A x||`` over each facet of the polyhedral unit ball."""
    FD = dom.functionals
    facets = dom.facet_functionals
    FC = cod.functionals @ A
    n = dom.dim
    m1, m2 = FC.shape[0], FD.shape[0]
    A_ub = np.vstack([
        np.hstack([FC, -np.ones((m1, 1))]), np.hstack([-FC, -np.ones((m1, 1))]),
        np.hstack([FD, np.zeros((m2, 1))]), np.hstack([-FD, np.zeros((m2, 1))]),
    ])
    b_ub = np.concatenate([np.zeros(2 * m1), np.ones(2 * m2)])
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    best = math.inf
    for phi in facets:
        res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=np.append(phi, 0.0)[None, :], b_eq=[1.0],
                      bounds=[(None, None)] * (n + 1), method="highs")
        if res.status == 0:
            best = min(best, float(res.fun))
    return best


def min_modulus(T: LinearMap, cfg: Config = DEFAULT) -> Interval:
    """Enclosure of the reduced minimum modulus; ``inf`` for the zero map."""
    K = T.kernel_basis()
    if K.shape[1] == T.domain.dim:
        return Interval(math.inf, math.inf)
    if K.shape[1] == 0:
        return lower_modulus(T.matrix, T.domain, T.codomain, cfg)
    Q = Quotient(T.domain, K)
    return lower_modulus(T.matrix @ Q.W, Q, T.codomain, cfg)


# ---------------------------------------------------------------------------
# perturbation checks
# ---------------------------------------------------------------------------


@dataclass
class Check:
    """Outcome of one inequality check ``lhs <= rhs``."""

    status: str
    lhs: float = math.nan
    rhs: float = math.nan

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass
class MarkusReport:
    """Perturbation inequalities for kernels and images of ``S`` and ``T``."""

    diff_norm: Interval
    gamma_S: Interval
    gamma_T: Interval
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())


def _leq(lhs: float, rhs: float, tol: float) -> Check:
    return Check("pass" if lhs <= rhs + tol else "fail", lhs, rhs)


def markus_check(S: LinearMap, T: LinearMap, cfg: Config = DEFAULT) -> MarkusReport:
    """Check kernel and image stability of the pair ``(S, T)``.

    (a) ``theta0(ker S, ker T) <= ||S - T|| / gamma(T)``
    (b) ``theta0(im S, im T) <= ||S - T|| / gamma(S)``
    (c), (d) if the kernel (image) opening is below one half, then
    ``|gamma(S) - gamma(T)| <= 3 ||S - T|| / (1 - 2 theta)``.

    Checks needing ``1 / gamma`` are skipped when the modulus is not
    certified positive or is infinite.
    """
    from .openings import theta, theta0

    D = op_norm(S.matrix - T.matrix, S.domain, S.codomain, cfg)
    gS, gT = min_modulus(S, cfg), min_modulus(T, cfg)
    kS, kT = S.kernel(), T.kernel()
    iS, iT = S.image(), T.image()
    tol = 1e-7
    checks = {}

    def ratio(g: Interval) -> float | None:
        if math.isinf(g.lower):
            return 0.0
        return None if g.lower <= 1e-12 else D.upper / g.lower

    r = ratio(gT)
    checks["a"] = Check("skip") if r is None else _leq(theta0(kS, kT, cfg).lower, r, tol)
    r = ratio(gS)
    checks["b"] = Check("skip") if r is None else _leq(theta0(iS, iT, cfg).lower, r, tol)

    def stability(th) -> Check:
        if th.upper >= 0.5 or math.isinf(gS.upper) or math.isinf(gT.upper):
            return Check("skip")
        gap = max(0.0, max(gS.lower - gT.upper, gT.lower - gS.upper))
        return _leq(gap, 3 * D.upper / (1 - 2 * th.upper), tol)

    checks["c"] = stability(theta(kS, kT, cfg))
    checks["d"] = stability(theta(iS, iT, cfg))
    return MarkusReport(D, gS, gT, checks)


@dataclass
class RegularTypeReport:
    """Image openings and defect numbers on a disc around ``alpha``."""

    alpha: complex
    c_alpha: float
    lambdas: list
    openings: list
    null_dims: list
    base_null_dim: int

    @property
    def ok(self) -> bool:
        return all(t <= 1.0 / 3.0 + 1e-3 for t in self.openings) and all(
            n == self.base_null_dim for n in self.null_dims)


def _realify(A: np.ndarray, lam: complex) -> np.ndarray:
    m, n = A.shape
    E = np.eye(m, n)
    J = np.array([[lam.real, -lam.imag], [lam.imag, lam.real]])
    return np.kron(A, np.eye(2)) - np.kron(E, J)


def regular_type_demo(A, alpha: complex, cfg: Config = DEFAULT, n_lambda: int = 10) -> RegularTypeReport:
    """Sample ``lambda`` with ``|lambda - alpha| < c(alpha) / 4`` and compare images.

    ``A`` is a real ``m x n`` matrix (``m >= n``) acting on complex
    Euclidean spaces; ``A - lambda`` uses the embedding ``C^n -> C^m``.
    ``c(alpha)`` is the reduced minimum modulus of ``A - alpha``, which
    must be injective.  The null defect ``N(lambda)`` is the codimension of
    the image.
    """
    from .openings import theta

    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    alpha = complex(alpha)
    dom, cod = Lp(2, 2 * n), Lp(2, 2 * m)
    Ta = LinearMap(_realify(A, alpha), dom, cod)
    if Ta.kernel_basis().shape[1]:
        raise ValueError("A - alpha must be injective")
    c = min_modulus(Ta, cfg).lower
    base_im = Ta.image()
    base_null = (2 * m - base_im.dim) // 2
    rng = np.random.default_rng(cfg.seed)
    lams, ths, nulls = [], [], []
    for _ in range(n_lambda):
        rho = rng.uniform(0, c / 4)
        phi = rng.uniform(0, 2 * np.pi)
        lam = alpha + rho * complex(math.cos(phi), math.sin(phi))
        T = LinearMap(_realify(A, lam), dom, cod)
        im = T.image()
        lams.append(lam)
        ths.append(theta(im, base_im, cfg).upper)
        nulls.append((2 * m - im.dim) // 2)
    return RegularTypeReport(alpha, c, lams, ths, nulls, base_null)


__all__ = ["Interval", "LinearMap", "op_norm", "lower_modulus", "min_modulus",
           "markus_check", "MarkusReport", "regular_type_demo", "RegularTypeReport", "Check"]
