"""Seeded property checks shared by the command-line suite and the tests.

Every property draws its random instances from a generator seeded by the
suite seed and the property name, so verdicts and numeric summaries are
reproducible.  Each property tallies passes, failures and skips and keeps
the worst margin ``lhs - rhs`` over the checked inequalities (negative
means every check held with room to spare).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linprog

from . import kernels
from .banach_mazur import bm_upper, prop61_check, prop62_embed
from .config import Config
from .constructions import (douady_pair, example_310, example_314, identity_642, kadets_bound,
                            kadets_glue, mazur_maps)
from .distance import dist_bounds, dist_lp
from .indices import build_index_set, h_index, prop621_check
from .norms import DirectSum, Lp, NormedSpace, Pullback
from .openings import (borsuk_extremal, dg_metric, duality_check, hilbert_theta, lambda_gap,
                       omega, theta, theta0)
from .operator_opening import inverse_bound_check, prop53_check, r0_bounds, r_bounds
from .operators import LinearMap, min_modulus, markus_check, op_norm, regular_type_demo
from .subspaces import Subspace, annihilator, sphere_net

TOL = 1e-9


@dataclass
class PropertyResult:
    """Tally of one property over its random instances."""

    name: str
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    worst: float = -math.inf
    notes: dict = field(default_factory=dict)

    def check(self, lhs: float, rhs: float, tol: float = TOL) -> bool:
        """Record the inequality ``lhs <= rhs + tol``."""
        ok = bool(lhs <= rhs + tol)
        self.worst = max(self.worst, float(lhs - rhs))
        if ok:
            self.passed += 1
        else:
            self.failed += 1
        return ok

    def flag(self, ok: bool):
        if ok:
            self.passed += 1
        else:
            self.failed += 1

    def skip(self):
        self.skipped += 1

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "failed": self.failed,
                "skipped": self.skipped, "worst_margin": _num(self.worst),
                "notes": {k: _num(v) for k, v in sorted(self.notes.items())}}


def _num(x):
    """Round to 12 significant digits so records are stable across platforms."""
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return None
    return float(f"{x:.12g}")


def rng_for(seed: int, name: str) -> np.random.Generator:
    """Generator keyed by the suite seed and a property name."""
    h = int.from_bytes(hashlib.sha256(f"{seed}:{name}".encode()).digest()[:8], "little")
    return np.random.default_rng(h)


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

FAMILIES = ("l1", "l2", "linf", "mixed")


def family_space(name: str, d: int, rng: np.random.Generator | None = None) -> NormedSpace:
    """``l_1^d``, ``l_2^d``, ``l_inf^d`` or a polyhedral direct sum of both kinds."""
    if name == "l1":
        return Lp(1, d)
    if name == "l2":
        return Lp(2, d)
    if name == "linf":
        return Lp(np.inf, d)
    if name == "mixed":
        a = d // 2 if d > 1 else 1
        if d == 1:
            return Lp(1, 1)
        outer = 1 if rng is None or rng.random() < 0.5 else np.inf
        return DirectSum([Lp(np.inf, a), Lp(1, d - a)], outer)
    raise ValueError(name)


def random_subspace(X: NormedSpace, k: int, rng: np.random.Generator) -> Subspace:
    return Subspace(X, rng.normal(size=(X.dim, k)))


def near_subspace(Y: Subspace, scale: float, rng: np.random.Generator) -> Subspace:
    """Random perturbation of ``Y`` of relative size ``scale``."""
    return Subspace(Y.space, Y.basis + scale * rng.normal(size=Y.basis.shape))


def _pair(rng, fam, dims=(2, 3, 4), equal=True, near=0.5):
    d = int(rng.choice(dims))
    X = family_space(fam, d, rng)
    k = int(rng.integers(1, d))
    Y = random_subspace(X, k, rng)
    if equal:
        Z = near_subspace(Y, float(rng.uniform(0.02, near)), rng) if rng.random() < 0.7 \
            else random_subspace(X, k, rng)
    else:
        Z = random_subspace(X, int(rng.integers(1, d)), rng)
    return X, Y, Z


# ---------------------------------------------------------------------------
# distances and subspaces
# ---------------------------------------------------------------------------


def _dual_sup(p: float, x: np.ndarray, N: np.ndarray) -> float:
    """``sup { f(x) : f in span N, ||f||_q <= 1 }`` by an explicit program."""
    d, m = N.shape
    if p == 2:
        Q = sla.orth(N)
        return float(np.linalg.norm(Q.T @ x))
    if p == 1:
        # dual unit ball is the cube
        res = linprog(-(N.T @ x), A_ub=np.vstack([N, -N]), b_ub=np.ones(2 * d),
                      bounds=[(None, None)] * m, method="highs")
        return float(-res.fun)
    # p = inf: dual is l_1, f = N c, |f_i| <= s_i, sum s <= 1
    c = np.concatenate([-(N.T @ x), np.zeros(d)])
    I = np.eye(d)
    A = np.vstack([np.hstack([N, -I]), np.hstack([-N, -I]),
                   np.concatenate([np.zeros(m), np.ones(d)])[None, :]])
    b = np.concatenate([np.zeros(2 * d), [1.0]])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * m + [(0, None)] * d, method="highs")
    return float(-res.fun)


def prop_distance_lipschitz(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("distance.lipschitz")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = FAMILIES[int(rng.integers(len(FAMILIES)))]
        X, Y, _ = _pair(rng, fam)
        P = rng.normal(size=(2, X.dim))
        lo, hi, _ = dist_bounds(X, P, Y.basis)
        gap = max(lo[0] - hi[1], lo[1] - hi[0])
        res.check(gap, float(X.norm(P[0] - P[1])), 1e-9)
    return res


def prop_distance_duality(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("distance.duality")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        p = [1.0, 2.0, np.inf][int(rng.integers(3))]
        d = int(rng.integers(2, 5))
        X = Lp(p, d)
        Z = random_subspace(X, int(rng.integers(1, d)), rng)
        x = rng.normal(size=d)
        lo, hi, _ = dist_bounds(X, x[None, :], Z.basis)
        s = _dual_sup(p, x, sla.null_space(Z.basis.T))
        res.check(abs(s - 0.5 * (lo[0] + hi[0])), 0.5 * (hi[0] - lo[0]), 2e-8)
    return res


def prop_distance_routes(seed: int, n: int, cfg: Config) -> PropertyResult:
    """Quotient-functional distances agree with the direct LP and the iterative solver."""
    from .distance import _dist_line, _dist_newton

    res = PropertyResult("distance.routes")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = ["l1", "linf", "mixed"][int(rng.integers(3))]
        X, Y, _ = _pair(rng, fam)
        x = rng.normal(size=X.dim)
        v = dist_bounds(X, x[None, :], Y.basis)[1][0]
        w = dist_lp(X, x, Y.basis)[0]
        res.check(abs(v - w), 0.0, 1e-8 * max(1.0, w))
        if Y.dim == 1:
            lo, hi, _ = _dist_line(X, x[None, :], Y.basis[:, 0])
        else:
            lo, hi, _ = _dist_newton(X, x[None, :], Y.basis)
        res.check(lo[0], w, 1e-8)
        res.check(w, hi[0], 1e-8)
    return res


def prop_annihilator_involution(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("subspaces.annihilator_involution")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = FAMILIES[int(rng.integers(len(FAMILIES)))]
        X, Y, _ = _pair(rng, fam, dims=(2, 3, 4, 5))
        A = annihilator(annihilator(Y))
        ok = A.dim == Y.dim and all(A.contains(v) for v in Y.basis.T)
        P = rng.normal(size=(8, X.dim))
        ok = ok and A.space.dim == X.dim and np.allclose(A.space.norm(P), X.norm(P), rtol=1e-9)
        res.flag(ok)
    return res


def prop_net_covering(seed: int, n: int, cfg: Config, probes: int = 10_000) -> PropertyResult:
    res = PropertyResult("subspaces.net_covering")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        p = [1.0, 1.5, 2.0, np.inf][int(rng.integers(4))]
        d = int(rng.integers(3, 5))
        k = int(rng.integers(2, min(d, 3) + 1))
        X = Lp(p, d)
        Y = random_subspace(X, k, rng)
        mesh = 0.15
        net = sphere_net(Y, mesh, cfg.budget)
        U = rng.normal(size=(probes, k)) @ Y.basis.T
        U = U / X.norm(U)[:, None]
        dist, _ = kernels.row_min_lp(U, net.points, p)
        res.check(float(dist.max()), mesh, 1e-12)
    return res


# ---------------------------------------------------------------------------
# openings
# ---------------------------------------------------------------------------


def prop_opening_axioms(seed: int, n: int, cfg: Config, families=FAMILIES) -> PropertyResult:
    """Range, symmetry, sandwich and triangle-type inequalities on random triples."""
    res = PropertyResult("openings.metric_axioms")
    rng = rng_for(seed, res.name)
    per = max(1, n // len(families))
    for fam in families:
        for _ in range(per):
            d = int(rng.choice((2, 3, 4)))
            X = family_space(fam, d, rng)
            k = int(rng.integers(1, d))
            Y1 = random_subspace(X, k, rng)
            Y2 = near_subspace(Y1, float(rng.uniform(0.02, 0.4)), rng)
            Y3 = near_subspace(Y2, float(rng.uniform(0.02, 0.4)), rng)
            t12, t23, t13 = theta(Y1, Y2, cfg), theta(Y2, Y3, cfg), theta(Y1, Y3, cfg)
            t21 = theta(Y2, Y1, cfg)
            l12 = lambda_gap(Y1, Y2, cfg)
            t0 = theta0(Y1, Y2, cfg)
            for rep in (t12, t23, t13, l12, t0):
                res.check(rep.upper, 1.0, 0.0)
                res.check(0.0, rep.lower, 0.0)
            res.flag(t12.value == t21.value and t12.upper == t21.upper)
            # both comparisons use the pessimistic side, so a coarser enclosure
            # on two-dimensional spheres keeps them sound
            o12 = omega(Y1, Y2, cfg if k <= 2 else cfg.with_(mesh=max(cfg.mesh or 0.0, 0.25)))
            res.check(t12.lower, o12.upper)
            res.check(o12.lower, 2 * t12.upper)
            a, b = t12.upper, t23.upper
            res.check(t13.lower, a + b + a * b)
            res.check(math.log1p(t13.lower), math.log1p(a) + math.log1p(b))
            res.check(dg_metric(Y1, Y3, cfg) - math.log1p(t13.upper), 0.0, 1e-12)
            r12, r23, r13 = r_bounds(Y1, Y2, cfg), r_bounds(Y2, Y3, cfg), r_bounds(Y1, Y3, cfg)
            res.check(math.log1p(r13.lower), math.log1p(r12.upper) + math.log1p(r23.upper))
    return res


def prop_equal_dims(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("openings.equal_dims")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = FAMILIES[int(rng.integers(len(FAMILIES)))]
        X, Y, Z = _pair(rng, fam, equal=False)
        t = theta(Y, Z, cfg)
        if t.upper < 1:
            res.flag(Y.dim == Z.dim)
        else:
            res.flag(True)
        if Y.dim != Z.dim:
            res.check(1.0, t.upper, 0.0)
    return res


def prop_hilbert(seed: int, n: int, cfg: Config, net_every: int = 4) -> PropertyResult:
    """Closed forms, the generic net route and ``r0`` agree with principal angles."""
    res = PropertyResult("openings.hilbert")
    rng = rng_for(seed, res.name)
    width = 0.0
    for i in range(n):
        d = int(rng.integers(2, 7))
        X = Lp(2, d)
        k = int(rng.integers(1, d))
        Y = random_subspace(X, k, rng)
        Z = near_subspace(Y, float(rng.uniform(0.05, 1.0)), rng) if rng.random() < 0.7 \
            else random_subspace(X, k, rng)
        h = hilbert_theta(Y, Z)
        t = theta(Y, Z, cfg)
        res.check(abs(t.value - h), t.width, 1e-12)
        r = r0_bounds(Y, Z, cfg)
        res.flag(r.lower - 1e-12 <= h <= r.upper + 1e-12)
        res.check(r.upper - r.lower, 5e-3, 0.0)
        width = max(width, r.upper - r.lower)
        if i % net_every == 0 and k <= 2:
            tn = theta(Y, Z, cfg.with_(force_net=True))
            res.check(abs(tn.value - h), tn.width, 1e-9)
    res.notes["r0_width_max"] = width
    return res


def prop_duality(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("openings.duality")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        p = [1.0, 2.0, np.inf][int(rng.integers(3))]
        d = int(rng.integers(2, 5))
        X = Lp(p, d)
        k = int(rng.integers(1, d))
        Y = random_subspace(X, k, rng)
        Z = near_subspace(Y, float(rng.uniform(0.02, 0.6)), rng) if rng.random() < 0.7 \
            else random_subspace(X, int(rng.integers(1, d)), rng)
        rep = duality_check(Y, Z, cfg)
        res.flag(rep.consistent)
        res.check(rep.theta_primal.lower, rep.theta_dual.upper)
        res.check(rep.theta_dual.lower, rep.theta_primal.upper)
    return res


def prop_borsuk(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("openings.borsuk")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = ["l1", "l2", "linf", "mixed", "l1.5"][int(rng.integers(5))]
        d = int(rng.integers(2, 5))
        X = Lp(1.5, d) if fam == "l1.5" else family_space(fam, d, rng)
        kz = int(rng.integers(0, min(d - 1, 2 if fam == "l1.5" else d - 1) + 1))
        Y = random_subspace(X, kz + 1, rng)
        Z = random_subspace(X, kz, rng)
        y, rep = borsuk_extremal(Y, Z, cfg)
        mesh = rep.mesh or 0.0
        res.check(1.0 - mesh - 1e-6, rep.lower, 0.0)
        res.check(abs(float(X.norm(y)) - 1.0), 0.0, 1e-9)
    return res


# ---------------------------------------------------------------------------
# operator opening
# ---------------------------------------------------------------------------


def prop_operator_opening(seed: int, n: int, cfg: Config) -> PropertyResult:
    """``r >= Theta``, range, symmetry, adjoint witnesses and inverse estimates."""
    res = PropertyResult("operator_opening.basic")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = FAMILIES[int(rng.integers(len(FAMILIES)))]
        X, Y, Z = _pair(rng, fam, near=0.3)
        r, rr = r_bounds(Y, Z, cfg), r_bounds(Z, Y, cfg)
        t = theta(Y, Z, cfg)
        res.check(t.lower, r.upper)
        res.check(t.lower - TOL, r.lower, 1e-9)
        res.check(r.upper, 1.0, 0.0)
        res.flag(r.lower == rr.lower and r.upper == rr.upper)
        r0 = r0_bounds(Y, Z, cfg)
        if r0.witness is not None and r0.upper < 1:
            C = r0.witness
            # the adjoint maps Z^perp onto Y^perp with the same distance to I
            Ct = C.T
            Xd = X.dual()
            Zp, Yp = annihilator(Z), annihilator(Y)
            img = Ct @ Zp.basis
            res.flag(all(Yp.contains(v, 1e-7) for v in img.T))
            adj = op_norm(Ct - np.eye(X.dim), Xd, Xd, cfg)
            direct = op_norm(C - np.eye(X.dim), X, X, cfg)
            res.check(adj.lower, direct.upper, 1e-8)
            dual_r0 = r0_bounds(Subspace(Xd, Zp.basis), Subspace(Xd, Yp.basis), cfg)
            res.check(dual_r0.lower, adj.upper, 1e-7)
            inv = inverse_bound_check(Y, Z, cfg)
            if inv.check.status == "skip":
                res.skip()
            else:
                res.check(inv.check.lhs, inv.check.rhs, 1e-8)
        else:
            res.skip()
    return res


def prop_projection_bound(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("operator_opening.projection_bound")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = FAMILIES[int(rng.integers(len(FAMILIES)))]
        X, Y, Z = _pair(rng, fam, dims=(2, 3), near=0.15)
        rep = prop53_check(Y, Z, cfg)
        if rep.check.status == "skip":
            res.skip()
        else:
            res.check(rep.check.lhs, rep.check.rhs, 1e-6)
    return res


# ---------------------------------------------------------------------------
# Banach-Mazur distance
# ---------------------------------------------------------------------------


def _small_spaces():
    hexagon = Pullback(Lp(np.inf, 3), np.array([[1.0, 0.0], [0.5, np.sqrt(3) / 2],
                                                [-0.5, np.sqrt(3) / 2]]))
    return [Lp(1, 2), Lp(2, 2), Lp(np.inf, 2), Lp(1.5, 2), hexagon]


def prop_bm(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("banach_mazur.symmetry_multiplicativity")
    rng = rng_for(seed, res.name)
    S = _small_spaces()
    cache = {}

    def bm(i, j):
        key = (min(i, j), max(i, j))
        if key not in cache:
            cache[key] = (bm_upper(S[i], S[j], cfg), bm_upper(S[j], S[i], cfg))
        a, b = cache[key]
        return a if i <= j else b

    for _ in range(n):
        i, j, w = (int(v) for v in rng.integers(len(S), size=3))
        res.check(abs(bm(i, j) - bm(j, i)), 0.0, 2e-3)
        res.check(bm(i, j), bm(i, w) * bm(w, j), 1e-3)
        res.check(1.0, bm(i, j), 1e-9)
    return res


def prop_bm_estimates(seed: int, n: int, cfg: Config) -> PropertyResult:
    """Distance estimate from ``r0`` and the gluing embedding."""
    res = PropertyResult("banach_mazur.estimates")
    rng = rng_for(seed, res.name)
    for i in range(n):
        fam = ["l1", "l2", "linf", "mixed"][i % 4]
        d = int(rng.integers(2, 4))
        X = family_space(fam, d, rng)
        Y = random_subspace(X, 2 if d > 2 and rng.random() < 0.5 else 1, rng)
        Z = near_subspace(Y, float(rng.uniform(0.02, 0.15)), rng)
        rep = prop61_check(Y, Z, cfg)
        if rep.check.status == "skip":
            res.skip()
        else:
            res.check(rep.check.lhs, rep.check.rhs, 1e-3)
    S = _small_spaces()[:4]
    for i in range(max(1, n // 4)):
        a, b = S[int(rng.integers(len(S)))], S[int(rng.integers(len(S)))]
        U = np.eye(2) + 0.3 * rng.normal(size=(2, 2))
        if abs(np.linalg.det(U)) < 0.1:
            res.skip()
            continue
        _, _, _, g = prop62_embed(a, b, U, 0.05, cfg, n_check=1000)
        res.check(g.isometry_error_y, 1e-6, 0.0)
        res.check(g.isometry_error_z, 1e-6, 0.0)
        res.check(g.omega_upper, g.target + 0.05)
        res.check(g.r0_upper, g.target, 1e-6)
    return res


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def prop_examples(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("constructions.examples")
    rng = rng_for(seed, res.name)
    pts = [(0.5, 1.0)] + [tuple(sorted(rng.uniform(0.05, 1.0, size=2))) for _ in range(n)]
    for a, b in pts:
        if b - a < 1e-3:
            res.skip()
            continue
        _, Y1, Y2, Y3, (e12, e13, e23) = example_310(a, b)
        for (P, Q), e in (((Y1, Y2), e12), ((Y1, Y3), e13), ((Y2, Y3), e23)):
            t = theta(P, Q, cfg)
            res.flag(t.contains(e, 1e-12))
    for a in [0.5] + list(rng.uniform(0.05, 0.95, size=n)):
        ex = example_314(a)
        ep, ed = ex.expected
        for (P, Q), e in ((ex.primal, ep), (ex.dual, ed)):
            res.flag(omega(P, Q, cfg).contains(e, 1e-9))
            res.flag(lambda_gap(P, Q, cfg).contains(e, 1e-9))
    return res


def prop_douady(seed: int, n: int, cfg: Config, spaces=("l1", "l2")) -> PropertyResult:
    res = PropertyResult("constructions.douady")
    rng = rng_for(seed, res.name)
    for fam in spaces:
        X = family_space(fam, 3)
        for eps in (0.1, 0.25)[:max(1, n)]:
            Y = random_subspace(X, 1, rng)
            pair = douady_pair(X, Y, eps)
            t = theta(pair.G0, pair.Geps, cfg)
            res.check(t.upper, eps + cfg.mesh_for(pair.G0.dim), 0.0)
            up, inv = pair.tau_bounds(X, cfg)
            res.check(up, 1 + eps, 1e-9)
            res.check(inv, 1 / eps, 1e-8 / eps)
    return res


def prop_kadets(seed: int, n: int, cfg: Config, ps=(1.2, 1.5, 1.9), ns=(2, 4, 6)) -> PropertyResult:
    res = PropertyResult("constructions.kadets")
    for p in ps:
        for dim in ns:
            T, D = mazur_maps(p, dim)
            coarse = None
            meshes = (0.04, 0.02) if dim <= 2 else (1.0, 0.5)
            for mesh in meshes:
                _, _, _, rep = kadets_glue(Lp(2, dim), Lp(p, dim), T, D, cfg, mesh=mesh,
                                           dual_mesh=mesh, direct_omega=dim <= 2 and mesh == meshes[-1])
                res.check(rep.kbound, kadets_bound(p), 1e-6)
                res.check(rep.omega.upper, rep.kbound + rep.net_slack, 1e-9)
                eta = mesh
                res.check(rep.isometry_error_y, eta, 1e-9)
                res.check(rep.isometry_error_z, D.modulus(eta), 1e-9)
                if coarse is not None:
                    # nested nets: the net supremum grows, and stays below the coarse certificate
                    res.check(coarse.kbound, rep.kbound, 1e-12)
                    res.check(rep.kbound, coarse.kbound_upper, 1e-12)
                coarse = rep
            res.notes[f"kbound_p{p:g}_n{dim}"] = coarse.kbound
    return res


def prop_identity(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("constructions.identity")
    side = max(2, int(round(math.sqrt(n))))
    for b in np.linspace(0.0, 1.0, side):
        for eps in np.linspace(0.01, 0.99, side):
            v = identity_642(float(eps), float(b))
            res.check(abs(v - max(1 - b, b + eps)), 0.0, 1e-12)
    a = math.sqrt(2) - 1
    res.check(abs(identity_642(a, a * a) - (2 * math.sqrt(2) - 2)), 0.0, 1e-12)
    return res


# ---------------------------------------------------------------------------
# indices
# ---------------------------------------------------------------------------


def prop_indices(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("indices.basic")
    rng = rng_for(seed, res.name)
    D2 = build_index_set("PackingD", m=2)
    spaces = [Lp(1, 2), Lp(2, 2), Lp(np.inf, 2), Lp(1.5, 3), Lp(1, 3), Lp(np.inf, 3),
              DirectSum([Lp(1, 2), Lp(np.inf, 2)], 1)]
    for X in spaces:
        h = h_index(X, D2, cfg)
        res.flag(h.lower == 1.0 and h.upper == 1.0)
    for p in (1.0, 1.5, 2.0):
        for m in (2, 3):
            X = Lp(p, m + int(rng.integers(0, 2)))
            h = h_index(X, build_index_set("PackingD", m=m), cfg)
            res.check(2 ** (1 / p) / 2, h.lower, 1e-9)
            res.check(0.0, h.lower, 0.0)
            res.check(h.upper, 1.0, 0.0)
    # enlarging the family cannot increase h: a witness for the larger family
    # is a feasible point for the smaller one
    for _ in range(max(1, n // 10)):
        X = spaces[int(rng.integers(len(spaces)))]
        small = build_index_set("PackingD", m=3)
        big = build_index_set("Custom", vectors=[tuple(v) for v in small.vectors]
                              + [(1, 0, 0), (0, 1, 0)])
        hb = h_index(X, big, cfg, mode="vectors")
        hs = h_index(X, small, cfg, mode="vectors", seeds=[hb.witness])
        res.check(hb.lower, hs.lower, 1e-9)
        res.check(hb.lower, hs.upper, 1e-9)
    return res


def prop_prop621(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("indices.subspace_bounds")
    rng = rng_for(seed, res.name)
    A = build_index_set("PackingD", m=2)
    for _ in range(n):
        fam = FAMILIES[int(rng.integers(len(FAMILIES)))]
        d = int(rng.integers(2, 4))
        X = family_space(fam, d, rng)
        k = int(rng.integers(1, d))
        Y = random_subspace(X, k, rng)
        Z = near_subspace(Y, float(rng.uniform(0.02, 0.6)), rng)
        rep = prop621_check(Y, Z, A, cfg)
        res.flag(rep.ok)
    return res


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def _perturbed_pair(rng, X: NormedSpace, Yc: NormedSpace, delta: float):
    """``T = A B^T`` and a rank-preserving perturbation ``S``."""
    m, d = Yc.dim, X.dim
    r = int(rng.integers(1, min(m, d) + 1))
    A, B = rng.normal(size=(m, r)), rng.normal(size=(d, r))
    T = A @ B.T
    S = (A + delta * rng.normal(size=A.shape)) @ (B + delta * rng.normal(size=B.shape)).T
    return LinearMap(S, X, Yc), LinearMap(T, X, Yc)


def prop_markus(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("operators.markus")
    rng = rng_for(seed, res.name)
    gamma_skips = total = 0
    for fam in FAMILIES:
        for _ in range(n):
            d, m = int(rng.integers(2, 5)), int(rng.integers(2, 5))
            X, Yc = family_space(fam, d, rng), family_space(fam, m, rng)
            S, T = _perturbed_pair(rng, X, Yc, float(rng.uniform(1e-3, 0.05)))
            rep = markus_check(S, T, cfg)
            for key in ("a", "b"):
                total += 1
                if rep.checks[key].status == "skip":
                    gamma_skips += 1
            for c in rep.checks.values():
                if c.status == "skip":
                    res.skip()
                else:
                    res.check(c.lhs, c.rhs, 1e-7)
    rate = gamma_skips / max(total, 1)
    res.notes["gamma_skip_rate"] = rate
    res.check(rate, 0.1, -1e-12)
    return res


def prop_gamma(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("operators.min_modulus")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        fam = ["l1", "l2", "linf"][int(rng.integers(3))]
        d = int(rng.integers(2, 4))
        X = family_space(fam, d)
        S, _ = _perturbed_pair(rng, X, X, 0.0)
        g = min_modulus(S, cfg)
        K = S.kernel_basis()
        P = rng.normal(size=(200, d))
        lo, _, _ = dist_bounds(X, P, K)
        keep = lo > 1e-9
        ratio = X.norm(P[keep] @ S.matrix.T) / lo[keep]
        res.check(g.lower, float(ratio.min()), 1e-9)
        if fam == "l2":
            s = np.linalg.svd(S.matrix, compute_uv=False)
            sv = float(s[s > 1e-10 * s.max()].min())
            gn = min_modulus(S, cfg.with_(force_net=True))
            res.flag(gn.contains(sv, 1e-9))
            res.flag(g.contains(sv, 1e-9))
    return res


def prop_regular_type(seed: int, n: int, cfg: Config) -> PropertyResult:
    res = PropertyResult("operators.regular_type")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        k = int(rng.integers(1, 3))
        m = k + int(rng.integers(0, 2))
        A = rng.normal(size=(m, k))
        alpha = complex(rng.normal(), rng.normal())
        try:
            rep = regular_type_demo(A, alpha, cfg.with_(seed=int(rng.integers(1 << 30))))
        except ValueError:
            res.skip()
            continue
        for t in rep.openings:
            res.check(t, 1 / 3, 1e-3)
        res.flag(all(v == rep.base_null_dim for v in rep.null_dims))
    return res


def prop_kernels(seed: int, n: int, cfg: Config) -> PropertyResult:
    from . import _kernels_py

    res = PropertyResult("kernels.backends")
    rng = rng_for(seed, res.name)
    for _ in range(n):
        a, b = rng.normal(size=(50, 4)), rng.normal(size=(70, 4))
        for p in (1.0, 1.5, 3.0):
            d1, i1 = kernels.row_min_lp(a, b, p)
            d2, i2 = _kernels_py.row_min_lp(a, b, p)
            res.check(float(np.abs(d1 - d2).max()), 0.0, 1e-12)
        d1, _ = kernels.row_min_cheb(a, b)
        d2, _ = _kernels_py.row_min_cheb(a, b)
        res.check(float(np.abs(d1 - d2).max()), 0.0, 1e-12)
        res.check(abs(kernels.sup_min_cheb(a, b) - _kernels_py.sup_min_cheb(a, b)), 0.0, 1e-12)
    return res


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

#: property name -> (function, smoke count, full count)
PROPERTIES = {
    "distance.lipschitz": (prop_distance_lipschitz, 20, 200),
    "distance.duality": (prop_distance_duality, 20, 200),
    "distance.routes": (prop_distance_routes, 10, 100),
    "subspaces.annihilator_involution": (prop_annihilator_involution, 10, 100),
    "subspaces.net_covering": (prop_net_covering, 2, 10),
    "openings.metric_axioms": (prop_opening_axioms, 20, 2000),
    "openings.equal_dims": (prop_equal_dims, 20, 200),
    "openings.hilbert": (prop_hilbert, 20, 200),
    "openings.duality": (prop_duality, 20, 200),
    "openings.borsuk": (prop_borsuk, 10, 50),
    "operator_opening.basic": (prop_operator_opening, 10, 200),
    "operator_opening.projection_bound": (prop_projection_bound, 10, 100),
    "banach_mazur.symmetry_multiplicativity": (prop_bm, 4, 30),
    "banach_mazur.estimates": (prop_bm_estimates, 4, 20),
    "constructions.examples": (prop_examples, 5, 50),
    "constructions.douady": (prop_douady, 1, 2),
    "constructions.kadets": (prop_kadets, 1, 1),
    "constructions.identity": (prop_identity, 25, 100),
    "indices.basic": (prop_indices, 10, 30),
    "indices.subspace_bounds": (prop_prop621, 10, 100),
    "operators.markus": (prop_markus, 10, 100),
    "operators.min_modulus": (prop_gamma, 10, 60),
    "operators.regular_type": (prop_regular_type, 5, 20),
    "kernels.backends": (prop_kernels, 5, 20),
}

#: smoke runs skip the slow Euclidean Douady pair and use lower dimensions for gluing
SMOKE_OVERRIDES = {
    "constructions.douady": {"spaces": ("l1",)},
    "constructions.kadets": {"ps": (1.5,), "ns": (4,)},
}


def run_property(name: str, seed: int, size: str, cfg: Config) -> PropertyResult:
    fn, smoke, full = PROPERTIES[name]
    kw = SMOKE_OVERRIDES.get(name, {}) if size == "smoke" else {}
    return fn(seed, smoke if size == "smoke" else full, cfg.with_(seed=seed), **kw)


def run_suite(seed: int = 1, size: str = "smoke", cfg: Config | None = None, names=None):
    """Run every registered property; yields results in registry order."""
    if size not in ("smoke", "full"):
        raise ValueError("size must be 'smoke' or 'full'")
    cfg = cfg or Config(seed=seed)
    for name in names or PROPERTIES:
        yield run_property(name, seed, size, cfg)


__all__ = ["PropertyResult", "PROPERTIES", "run_property", "run_suite", "family_space",
           "random_subspace", "near_subspace", "rng_for", "FAMILIES"]
