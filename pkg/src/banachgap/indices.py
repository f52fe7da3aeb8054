"""Index ``h(X, A) = sup_x inf_{a in A} ||sum_g a(g) x(g)||`` for finite index sets.

``x`` ranges over families ``Gamma -> B(X)`` with ``sup ||x(g)|| = 1`` and ``A``
is a subset of the unit sphere of ``l_1(Gamma)``.  Each set is stored twice:

* ``vectors``: a finite rational truncation, used by the max-min ascent;
* ``pieces``: the closure of the family on ``Gamma`` as a union of products
  of scaled signed simplices.  The inner infimum over one piece is a convex
  problem, solved exactly for polyhedral norms and with a dual certificate
  otherwise.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog, minimize

from .config import DEFAULT, BudgetExceeded, Config
from .norms import NormedSpace
from .openings import lambda0, theta0
from .operators import Check, Interval
from .polyhedral import PolyhedralTooLarge
from .subspaces import Subspace

#: Default cap on ``dim(X) * |Gamma|``.
INDEX_BUDGET = 24
L1_TOL = 1e-12


class Family(enum.Enum):
    REFLEXIVITY_R = "ReflexivityR"
    PACKING_D = "PackingD"
    FULL_SPHERE = "FullSphere"
    GIESY_BLOCK = "GiesyBlock"
    JAMES_BLOCK = "JamesBlock"
    BEAUZAMY_TAIL = "BeauzamyTail"
    CUSTOM = "Custom"


#: A group is ``(indices, signs, mass)``: ``a[indices] = mass * signs * t``, ``t`` in a simplex.
Group = tuple[tuple[int, ...], tuple[int, ...], Fraction]
Piece = tuple[Group, ...]


@dataclass(frozen=True)
class IndexSetA:
    """Finite truncation of a subset of ``S(l_1(Gamma))``."""

    gamma_size: int
    vectors: np.ndarray
    family_tag: Family
    pieces: tuple[Piece, ...] = field(default=())
    params: tuple = ()

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=float)
        if V.ndim != 2 or V.shape[1] != self.gamma_size:
            raise ValueError("vectors must be an (n, m) array")
        if V.shape[0] == 0:
            raise ValueError("the index set is empty")
        if np.abs(np.abs(V).sum(axis=1) - 1).max() > L1_TOL:
            raise ValueError("every vector must have l1-norm one")
        object.__setattr__(self, "vectors", V)
        if not self.pieces:
            object.__setattr__(self, "pieces", tuple(_vector_piece(v) for v in V))

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    def subset_of(self, other: "IndexSetA", tol: float = 1e-12) -> bool:
        """Whether every vector (up to sign) also lies in ``other.vectors``."""
        if other.gamma_size != self.gamma_size:
            return False
        W = other.vectors
        for v in self.vectors:
            d = np.minimum(np.abs(W - v).max(axis=1), np.abs(W + v).max(axis=1))
            if d.min() > tol:
                return False
        return True


def _vector_piece(v) -> Piece:
    return tuple(((i,), (int(np.sign(c)),), Fraction(abs(float(c)))) for i, c in enumerate(v) if c != 0)


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def _weak_compositions(total: int, parts: int):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for c in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for x in c:
            out.append(x - prev - 1)
            prev = x
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def _canon(vec: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    for c in vec:
        if c != 0:
            return vec if c > 0 else tuple(-x for x in vec)
    return vec


def _finish(tag: Family, m: int, vecs, pieces, params, check) -> IndexSetA:
    seen, out = set(), []
    for v in vecs:
        v = tuple(Fraction(x) for x in v)
        if sum(abs(x) for x in v) != 1:
            raise AssertionError("emitted vector is not on the l1 sphere")
        if not check(v):
            raise AssertionError(f"emitted vector violates the {tag.value} constraints")
        key = _canon(v)
        if key not in seen:
            seen.add(key)
            out.append(v)
    if not out:
        raise ValueError("the truncation is empty")
    V = np.array([[float(x) for x in v] for v in out])
    return IndexSetA(m, V, tag, tuple(pieces), params)


def _sphere_pieces(S: tuple[int, ...]) -> list[Piece]:
    out = []
    for signs in itertools.product((1, -1), repeat=len(S) - 1):
        out.append(((S, (1,) + signs, Fraction(1)),))
    return out


def _sphere_vectors(S: tuple[int, ...], m: int, r: int):
    half = Fraction(1, r)
    for comp in _weak_compositions(r, len(S)):
        nz = [i for i, c in enumerate(comp) if c]
        for signs in itertools.product((1, -1), repeat=len(nz)):
            v = [Fraction(0)] * m
            for s, i in zip(signs, nz):
                v[S[i]] = s * comp[i] * half
            yield v


def _split_vectors(neg: tuple[int, ...], pos: tuple[int, ...], m: int, r: int):
    """``-1/2`` spread over ``neg`` and ``+1/2`` over ``pos`` on a grid of step ``1/(2r)``."""
    step = Fraction(1, 2 * r)
    for cn in _weak_compositions(r, len(neg)):
        for cp in _weak_compositions(r, len(pos)):
            v = [Fraction(0)] * m
            for i, c in zip(neg, cn):
                v[i] = -c * step
            for i, c in zip(pos, cp):
                v[i] = c * step
            yield v


def build_index_set(family_tag, **params) -> IndexSetA:
    """Finite truncation of one of the standard families.

    Parameters
    ----------
    family_tag : Family or str
    params
        ``m`` (size of ``Gamma``) for ``PackingD``, ``ReflexivityR``,
        ``FullSphere`` and ``BeauzamyTail``; ``nmax`` (largest block) for
        ``GiesyBlock`` and ``JamesBlock``; ``grid`` (coefficient resolution,
        default 1 or 2) for families with continuous coefficients;
        ``vectors`` for ``Custom``.
    """
    tag = Family(family_tag) if not isinstance(family_tag, Family) else family_tag
    if not params:
        raise ValueError("truncation parameters are required")
    grid = int(params.get("grid", 1 if tag == Family.REFLEXIVITY_R else 2))
    if grid < 1:
        raise ValueError("grid must be positive")
    half = Fraction(1, 2)

    if tag == Family.PACKING_D:
        m = _pos(params, "m", 2)
        vecs = []
        for i, j in itertools.combinations(range(m), 2):
            v = [Fraction(0)] * m
            v[i], v[j] = half, -half
            vecs.append(v)
        pieces = [_vector_piece(np.array([float(x) for x in v])) for v in vecs]

        def check(v):
            nz = [x for x in v if x]
            return len(nz) == 2 and sorted(nz) == [-half, half]
        return _finish(tag, m, vecs, pieces, (("m", m),), check)

    if tag == Family.REFLEXIVITY_R:
        m = _pos(params, "m", 2)
        vecs, pieces = [], []
        for n in range(1, m):
            pos, neg = tuple(range(n)), tuple(range(n, m))
            pieces.append(((pos, (1,) * len(pos), half), (neg, (-1,) * len(neg), half)))
            vecs.extend(_split_vectors(neg, pos, m, grid))

        def check(v):
            # nonnegative head summing to 1/2, nonpositive tail summing to -1/2
            for n in range(1, m):
                if all(x >= 0 for x in v[:n]) and all(x <= 0 for x in v[n:]) \
                        and sum(v[:n]) == half and sum(v[n:]) == -half:
                    return True
            return False
        return _finish(tag, m, vecs, pieces, (("m", m), ("grid", grid)), check)

    if tag == Family.FULL_SPHERE:
        m = _pos(params, "m", 1)
        S = tuple(range(m))
        return _finish(tag, m, _sphere_vectors(S, m, grid), _sphere_pieces(S),
                       (("m", m), ("grid", grid)), lambda v: True)

    if tag in (Family.GIESY_BLOCK, Family.JAMES_BLOCK):
        nmax = _pos(params, "nmax", 1 if tag == Family.GIESY_BLOCK else 2)
        m = nmax * (nmax + 1) // 2
        blocks = {n: tuple(range(n * (n - 1) // 2, n * (n + 1) // 2)) for n in range(1, nmax + 1)}
        vecs, pieces = [], []
        for n, B in blocks.items():
            if tag == Family.GIESY_BLOCK:
                vecs.extend(_sphere_vectors(B, m, grid))
                pieces.extend(_sphere_pieces(B))
            else:
                for k in range(1, n):
                    neg, pos = B[:k], B[k:]
                    vecs.extend(_split_vectors(neg, pos, m, grid))
                    pieces.append(((neg, (-1,) * k, half), (pos, (1,) * (n - k), half)))

        def in_block(v):
            nz = [i for i, x in enumerate(v) if x]
            for n, B in blocks.items():
                if set(nz) <= set(B):
                    return n, B
            return None

        if tag == Family.GIESY_BLOCK:
            check = lambda v: in_block(v) is not None  # noqa: E731
        else:
            def check(v):
                hit = in_block(v)
                if hit is None:
                    return False
                n, B = hit
                w = [v[i] for i in B]
                for k in range(1, n):
                    if all(x <= 0 for x in w[:k]) and all(x >= 0 for x in w[k:]) \
                            and sum(w[:k]) == -half:
                        return True
                return False
        if tag == Family.JAMES_BLOCK and not pieces:
            raise ValueError("JamesBlock needs nmax >= 2")
        return _finish(tag, m, vecs, pieces, (("nmax", nmax), ("grid", grid)), check)

    if tag == Family.BEAUZAMY_TAIL:
        m = _pos(params, "m", 1)
        # supports (1-based) whose least element is at least their size
        supports = []
        for size in range(1, m + 1):
            for S in itertools.combinations(range(1, m + 1), size):
                if S[0] >= size:
                    supports.append(S)
        maximal = [S for S in supports if not any(set(S) < set(T) for T in supports)]
        vecs, pieces = [], []
        for S in maximal:
            S0 = tuple(i - 1 for i in S)
            vecs.extend(_sphere_vectors(S0, m, grid))
            pieces.extend(_sphere_pieces(S0))

        def check(v):
            supp = [i + 1 for i, x in enumerate(v) if x]
            return bool(supp) and supp[0] >= len(supp)
        return _finish(tag, m, vecs, pieces, (("m", m), ("grid", grid)), check)

    if tag == Family.CUSTOM:
        V = np.atleast_2d(np.asarray(params["vectors"], dtype=float))
        return IndexSetA(V.shape[1], V, tag)
    raise ValueError(f"unknown family {tag}")


def _pos(params, key, least):
    if key not in params:
        raise ValueError(f"parameter {key!r} is required")
    v = int(params[key])
    if v < least:
        raise ValueError(f"{key} must be at least {least}")
    return v


# ---------------------------------------------------------------------------
# inner minimisation
# ---------------------------------------------------------------------------


def _fast_functionals(X: NormedSpace, cap: int = 5000):
    if not X.is_polyhedral:
        return None
    try:
        F = X.facet_functionals
    except PolyhedralTooLarge:
        return None
    return F if F.shape[0] <= cap else None


def _piece_matrix(piece: Piece, x: np.ndarray):
    """Columns ``mass * sign * x(i)`` per group, and group sizes."""
    cols, sizes = [], []
    for idx, signs, mass in piece:
        cols.append(float(mass) * np.asarray(signs, float)[:, None] * x[list(idx)])
        sizes.append(len(idx))
    return np.vstack(cols), sizes


def _piece_min_lp(F, C, sizes):
    n = C.shape[0]
    G = F @ C.T                     # (nf, n)
    ones = np.ones((G.shape[0], 1))
    A_ub = np.vstack([np.hstack([G, -ones]), np.hstack([-G, -ones])])
    b_ub = np.zeros(2 * G.shape[0])
    A_eq = np.zeros((len(sizes), n + 1))
    s = 0
    for g, k in enumerate(sizes):
        A_eq[g, s:s + k] = 1.0
        s += k
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=np.ones(len(sizes)),
                  bounds=[(0, None)] * n + [(None, None)], method="highs")
    if res.status != 0:
        raise RuntimeError(f"index LP failed: {res.message}")
    v = max(float(res.fun), 0.0)
    return max(v - 1e-9, 0.0), v, res.x[:n]


def _simplex_lower(C, sizes, phi):
    """``sum_g min_i phi(C_i)`` over the groups: a lower bound for any unit ``phi``."""
    vals = C @ phi
    out, s = 0.0, 0
    for k in sizes:
        out += vals[s:s + k].min()
        s += k
    return out


def _piece_min_smooth(X, C, sizes):
    n = C.shape[0]
    t0 = np.concatenate([np.full(k, 1.0 / k) for k in sizes])
    cons = []
    s = 0
    for k in sizes:
        sl = slice(s, s + k)
        cons.append({"type": "eq", "fun": lambda t, sl=sl: t[sl].sum() - 1.0})
        s += k

    def f(t):
        return float(X.norm(t @ C))

    res = minimize(f, t0, method="SLSQP", bounds=[(0, 1)] * n, constraints=cons,
                   options={"ftol": 1e-12, "maxiter": 300})
    t = np.clip(res.x, 0, None)
    s = 0
    for k in sizes:
        t[s:s + k] /= t[s:s + k].sum()
        s += k
    y = t @ C
    hi = float(X.norm(y))
    if hi < 1e-14:
        return 0.0, hi, t
    _, g = X.grad(y[None, :])
    phi = g[0] / X.dual_norm(g[0])
    lo = max(0.0, _simplex_lower(C, sizes, phi))
    return min(lo, hi), hi, t


def piece_minimum(X: NormedSpace, piece: Piece, x: np.ndarray, F=None) -> tuple[float, float]:
    """Enclosure of ``min ||a(x)||`` over one piece."""
    C, sizes = _piece_matrix(piece, x)
    if all(k == 1 for k in sizes):
        v = float(X.norm(C.sum(axis=0)))
        return v, v
    if F is not None:
        lo, hi, _ = _piece_min_lp(F, C, sizes)
        return lo, hi
    lo, hi, _ = _piece_min_smooth(X, C, sizes)
    return lo, hi


def inner_minimum(X: NormedSpace, A: IndexSetA, x: np.ndarray, mode: str = "pieces") -> tuple[float, float]:
    """Enclosure of ``inf_{a in A} ||a(x)||``."""
    x = np.asarray(x, dtype=float)
    if mode == "vectors":
        v = float(X.norm(A.vectors @ x).min())
        return v, v
    F = _fast_functionals(X)
    lo, hi = math.inf, math.inf
    for p in A.pieces:
        a, b = piece_minimum(X, p, x, F)
        lo, hi = min(lo, a), min(hi, b)
    return lo, hi


# ---------------------------------------------------------------------------
# outer maximisation
# ---------------------------------------------------------------------------


@dataclass
class IndexResult:
    """Enclosure of ``h(X, A)`` with the best family found."""

    lower: float
    upper: float
    witness: np.ndarray
    mode: str
    upper_method: str

    @property
    def interval(self) -> Interval:
        return Interval(self.lower, self.upper)


def _normalise(x, X):
    n = X.norm(x)
    top = n.max()
    return x / top if top > 0 else x


def _project(x, X):
    n = X.norm(x)
    return x / np.maximum(n, 1.0)[:, None]


def _seeds(X: NormedSpace, m: int, rng, count: int, extra) -> list[np.ndarray]:
    d = X.dim
    E = np.eye(d)
    out = []
    if extra is not None:
        out.extend(np.asarray(s, dtype=float).reshape(m, d) for s in extra)
    out.append(np.array([E[g % d] for g in range(m)]))                       # disjoint supports
    out.append(np.array([E[0] * (-1) ** g for g in range(m)]))               # alternating
    out.append(np.array([E[0] * (1 if g < (m + 1) // 2 else -1) for g in range(m)]))
    out.append(np.array([E[0] * (1 if g == 0 else -1) for g in range(m)]))
    if d > 1:
        out.append(np.array([E[g % d] * (-1) ** (g // d) for g in range(m)]))
    while len(out) < count:
        out.append(rng.normal(size=(m, d)))
    return [_normalise(s, X) for s in out[:max(count, len(out))]]


def _ascent(X, V, x, iters: int = 150):
    """Projected subgradient ascent of ``min_a ||a(x)||`` over ``B(X)^Gamma``."""
    best_x, best_v = x.copy(), float(X.norm(V @ x).min())
    for it in range(iters):
        Y = V @ x
        vals, G = X.grad(Y)
        vmin = vals.min()
        act = vals <= vmin + 1e-3 * max(vmin, 1e-3)
        g = V[act].T @ G[act] / act.sum()          # (m, d)
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        x = _project(x + (0.2 / math.sqrt(it + 1)) * g / gn, X)
        v = float(X.norm(V @ x).min() / max(X.norm(x).max(), 1e-300))
        if v > best_v:
            best_x, best_v = _normalise(x, X), v
    return best_x, best_v


def h_index(X: NormedSpace, A: IndexSetA, cfg: Config = DEFAULT, mode: str = "pieces",
            seeds=None, budget: int = INDEX_BUDGET, restarts: int = 32) -> IndexResult:
    """Enclosure of the index ``h(X, A)``.

    Parameters
    ----------
    mode : {"pieces", "vectors"}
        ``pieces`` uses the closure of the family on ``Gamma``; ``vectors``
        the finite truncation only.
    seeds : iterable of (m, dim) arrays, optional
        Extra starting families (for example the witness of a larger set).
    """
    d, m = X.dim, A.gamma_size
    if d * m > budget:
        raise BudgetExceeded(f"dim(X) * |Gamma| = {d * m} exceeds the index budget {budget}")
    if mode not in ("pieces", "vectors"):
        raise ValueError(mode)
    if d == 0:
        return IndexResult(0.0, 0.0, np.zeros((m, 0)), mode, "trivial")
    rng = np.random.default_rng(cfg.seed)
    V = A.vectors
    cands = []
    for x0 in _seeds(X, m, rng, restarts, seeds):
        x, v = _ascent(X, V, x0)
        cands.append((v, x))
        if v < float(X.norm(V @ x0).min()):
            cands.append((float(X.norm(V @ x0).min()), x0))
    cands.sort(key=lambda c: -c[0])
    best_lo, best_x = 0.0, cands[0][1]
    for _, x in cands[:6]:
        x = _normalise(x, X)
        lo, _ = inner_minimum(X, A, x, mode)
        if lo > best_lo:
            best_lo, best_x = lo, x
    upper, how = _upper_bound(X, A, mode, cfg)
    upper = max(upper, best_lo)
    return IndexResult(float(min(best_lo, 1.0)), float(min(upper, 1.0)), best_x, mode, how)


def _upper_bound(X: NormedSpace, A: IndexSetA, mode: str, cfg: Config) -> tuple[float, str]:
    if mode == "pieces":
        for p in A.pieces:
            if len(p) == 1 and len(p[0][0]) > X.dim:
                # a full l1-sphere piece on more coordinates than dim X
                return 0.0, "rank"
    if X.dim * A.gamma_size <= 4:
        try:
            return _grid_upper(X, A.vectors, cfg), "grid"
        except BudgetExceeded:
            pass
    return 1.0, "trivial"


def _grid_upper(X: NormedSpace, V: np.ndarray, cfg: Config, target: float = 0.02,
                max_evals: int = 2_000_000) -> float:
    """Branch-and-bound over product cells of ``B(X)^Gamma``.

    ``min_a ||a(x)||`` is 1-Lipschitz for ``max_g ||x(g) - x'(g)||`` because
    every ``a`` has l1-norm one, so a cell contributes at most its centre
    value plus its radius.  Cells with centre farther than the radius from
    ``B(X)`` are discarded.  ``V`` is a subset of ``A``, so the bound also
    covers any set containing it.
    """
    d, m = X.dim, V.shape[1]
    # bounding box of B(X): |x_i| <= ||e_i^*||_*
    box = X.dual_norm(np.eye(d))
    corners = np.array(list(itertools.product((-1.0, 1.0), repeat=d)))
    cscale = float(X.norm(corners * box).max()) / 2.0       # radius of a unit-half-side cell
    # cells: centres (N, m, d), half-side h as fraction of box
    centres = np.zeros((1, m, d))
    h = 1.0
    best = 0.0
    evals = 0
    leaves = 0.0
    while True:
        P = centres * box
        rad = cscale * h * 2.0
        norms = X.norm(P.reshape(-1, d)).reshape(-1, m)
        keep = (norms <= 1 + rad).all(axis=1)
        P = P[keep]
        if P.shape[0] == 0:
            break
        vals = X.norm(np.einsum("ag,ngd->nad", V, P).reshape(-1, d)).reshape(P.shape[0], -1).min(axis=1)
        inside = (norms[keep] <= 1).all(axis=1)
        if inside.any():
            best = max(best, float(vals[inside].max()))
        evals += P.shape[0]
        upper = vals + rad
        need = upper > best + target
        if (~need).any():
            leaves = max(leaves, float(upper[~need].max()))
        if not need.any():
            break
        nxt = int(need.sum()) * 2 ** (d * m)
        if evals + nxt > max_evals:
            raise BudgetExceeded("grid relaxation budget exhausted")
        C = centres[keep][need]
        h /= 2
        offs = np.array(list(itertools.product((-h, h), repeat=d * m))).reshape(-1, m, d)
        centres = (C[:, None] + offs[None]).reshape(-1, m, d)
    return max(best, leaves)


# ---------------------------------------------------------------------------
# stability of the index under small openings
# ---------------------------------------------------------------------------


@dataclass
class Prop621Report:
    """Both index inequalities with the quantities entering them."""

    hY: IndexResult
    hZ: IndexResult
    lambda0_upper: float
    theta0_upper: float
    ball: Check
    spherical: Check

    @property
    def ok(self) -> bool:
        return self.ball.ok and self.spherical.ok


def prop621_check(Y: Subspace, Z: Subspace, A: IndexSetA, cfg: Config = DEFAULT,
                  slack: float = 1e-9, mode: str = "pieces") -> Prop621Report:
    """Check ``Lambda0(Y, Z) >= h(Y, A) - h(Z, A)`` and the opening version."""
    hY = h_index(Y.induced, A, cfg, mode)
    hZ = h_index(Z.induced, A, cfg, mode)
    lam = lambda0(Y, Z, cfg).upper
    th = theta0(Y, Z, cfg).upper
    rhs = hY.lower - hZ.upper
    ball = Check("pass" if lam + slack >= rhs else "fail", lam, rhs)
    lhs9 = th * (1 + hZ.upper)
    sph = Check("pass" if lhs9 + slack >= rhs else "fail", lhs9, rhs)
    return Prop621Report(hY, hZ, lam, th, ball, sph)


__all__ = ["Family", "IndexSetA", "build_index_set", "h_index", "IndexResult", "inner_minimum",
           "piece_minimum", "prop621_check", "Prop621Report", "INDEX_BUDGET"]
