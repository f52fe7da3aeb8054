"""Finite-dimensional normed spaces described by recursive norm trees.

Every space is a :class:`NormedSpace` on ``R^dim``.  Leaves are
:class:`Lp` and :class:`WeightedLp`; composite nodes are
:class:`DirectSum`, :class:`Quotient`, :class:`Dual` and :class:`Pullback`.

Three evaluation regimes are recognised syntactically:

* Euclidean trees (every exponent equal to 2) carry an explicit factor
  ``G`` with ``||x|| = |G x|_2``.
* Polyhedral trees (every exponent in {1, inf}) carry an explicit
  functional matrix ``F`` with ``||x|| = max |F x|`` and a generator matrix
  ``V`` whose symmetric hull is the unit ball.
* Everything else is evaluated recursively, with quotient norms computed
  by certified convex minimisation.
"""

from __future__ import annotations

import hashlib
import json
import math
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from . import polyhedral as ph

INF = math.inf


def parse_p(p) -> float:
    """Normalise an exponent given as a number or the string ``"inf"``."""
    if isinstance(p, str):
        if p.lower() in ("inf", "infinity", "oo"):
            return INF
        p = float(p)
    p = float(p)
    if not (p >= 1.0):
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    return p


def conjugate(p: float) -> float:
    """Conjugate exponent ``q`` with ``1/p + 1/q = 1``."""
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


def _pnorm_rows(X: np.ndarray, p: float) -> np.ndarray:
    if X.shape[1] == 0:
        return np.zeros(X.shape[0])
    if p == INF:
        # avoids materialising |X|, which dominates for wide functional blocks
        return np.maximum(X.max(axis=1), -X.min(axis=1))
    A = np.abs(X)
    if p == 1.0:
        return A.sum(axis=1)
    if p == 2.0:
        return np.sqrt((A * A).sum(axis=1))
    m = A.max(axis=1)
    safe = np.where(m > 0, m, 1.0)
    return m * ((A / safe[:, None]) ** p).sum(axis=1) ** (1.0 / p)


def _pnorm_grad_rows(X: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Values and dual-unit subgradients of the plain l_p norm."""
    vals = _pnorm_rows(X, p)
    N, n = X.shape
    G = np.zeros_like(X)
    if n == 0:
        return vals, G
    if p == INF:
        j = np.argmax(np.abs(X), axis=1)
        G[np.arange(N), j] = np.sign(X[np.arange(N), j])
    elif p == 1.0:
        G = np.sign(X)
    else:
        safe = np.where(vals > 0, vals, 1.0)
        G = np.sign(X) * (np.abs(X) / safe[:, None]) ** (p - 1.0)
    G[vals == 0] = 0.0
    return vals, G


def _orth_complement(B: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the Euclidean complement of ``span(B)``."""
    d = B.shape[0]
    if B.shape[1] == 0:
        return np.eye(d)
    return sla.null_space(B.T)


def _orth(B: np.ndarray) -> np.ndarray:
    if B.shape[1] == 0:
        return B.copy()
    return sla.orth(B)


class NormedSpace:
    """Base class for a norm on ``R^dim``.

    Subclasses implement ``_rows`` (batched evaluation), ``dual`` and the
    structural predicates.  Public evaluation accepts a single vector or a
    2-d array of row vectors.
    """

    dim: int

    # -- structure ---------------------------------------------------------
    @property
    def is_polyhedral(self) -> bool:
        raise NotImplementedError

    @property
    def is_euclidean(self) -> bool:
        raise NotImplementedError

    def dual(self) -> "NormedSpace":
        """Syntactic dual space, free of :class:`Dual` nodes at the root."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def fingerprint(self) -> str:
        """Short stable hash of the descriptor."""
        blob = json.dumps(self.to_dict(), sort_keys=True, default=_json_default)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"

    # -- evaluation --------------------------------------------------------
    def _rows(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _bounds_rows(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        v = self._rows(X)
        return v, v

    def _prep(self, x) -> tuple[np.ndarray, bool]:
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        if X.shape[1] != self.dim:
            raise ValueError(f"expected vectors of length {self.dim}, got {X.shape[1]}")
        return X, single

    def norm(self, x):
        """Norm of a vector, or of each row of a 2-d array."""
        X, single = self._prep(x)
        if self.is_euclidean:
            v = np.linalg.norm(X @ self.factor.T, axis=1)
        elif self._fast_polyhedral:
            v = np.abs(X @ self.functionals.T).max(axis=1)
        else:
            v = self._rows(X)
        return float(v[0]) if single else v

    def norm_bounds(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Certified lower and upper bounds on the norm of each row.

        Equal for every space except quotients of non-polyhedral,
        non-Euclidean parents, whose norms are computed iteratively.
        """
        X, _ = self._prep(x)
        if self.is_euclidean or self._fast_polyhedral:
            v = self.norm(X)
            return v, v
        return self._bounds_rows(X)

    def dual_norm(self, f):
        """Dual norm ``sup_{|x| <= 1} f(x)`` of a functional (or rows)."""
        return self.dual_space.norm(f)

    @cached_property
    def dual_space(self) -> "NormedSpace":
        return self.dual()

    def grad(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Values and norming subgradients (dual norm one) for each row."""
        X, _ = self._prep(x)
        if self.is_euclidean:
            G = self.factor
            Y = X @ G.T
            v = np.linalg.norm(Y, axis=1)
            safe = np.where(v > 0, v, 1.0)
            D = (Y / safe[:, None]) @ G
            D[v == 0] = 0.0
            return v, D
        if self._fast_polyhedral:
            F = self.functionals
            S = X @ F.T
            j = np.argmax(np.abs(S), axis=1)
            r = np.arange(X.shape[0])
            v = np.abs(S[r, j])
            D = np.sign(S[r, j])[:, None] * F[j]
            return v, D
        return self._grad_rows(X)

    def _grad_rows(self, X):
        raise NotImplementedError

    # -- polyhedral data -----------------------------------------------------
    @cached_property
    def _fast_polyhedral(self) -> bool:
        if not self.is_polyhedral:
            return False
        if isinstance(self, (Lp, WeightedLp)):
            return False
        try:
            return self.functionals.shape[0] <= 20_000
        except ph.PolyhedralTooLarge:
            return False

    @cached_property
    def functionals(self) -> np.ndarray:
        """Rows ``f_i`` with ``||x|| = max_i |f_i x|`` (polyhedral only)."""
        self._require_polyhedral()
        return self._functionals()

    @cached_property
    def generators(self) -> np.ndarray:
        """Rows ``v_j`` whose symmetric hull is the unit ball (polyhedral only)."""
        self._require_polyhedral()
        return self._generators()

    @cached_property
    def ball_vertices(self) -> np.ndarray:
        """Extreme generators, one per +- pair."""
        return ph.extreme_points(self.generators)

    @cached_property
    def facet_functionals(self) -> np.ndarray:
        """Functionals defining facets of the unit ball, one per +- pair."""
        return ph.extreme_points(self.functionals)

    def _require_polyhedral(self):
        if not self.is_polyhedral:
            raise ValueError(f"{self!r} is not polyhedral")

    def _functionals(self) -> np.ndarray:
        raise NotImplementedError

    def _generators(self) -> np.ndarray:
        raise NotImplementedError

    # -- Euclidean data ------------------------------------------------------
    @cached_property
    def factor(self) -> np.ndarray:
        """Injective ``G`` with ``||x|| = |G x|_2`` (Euclidean only)."""
        if not self.is_euclidean:
            raise ValueError(f"{self!r} is not Euclidean")
        return self._factor()

    def _factor(self) -> np.ndarray:
        raise NotImplementedError

    # -- Euclidean equivalence ----------------------------------------------
    @cached_property
    def equivalence(self) -> tuple[float, float]:
        """Constants ``(a, b)`` with ``a|x|_2 <= ||x|| <= b|x|_2``."""
        if self.dim == 0:
            return 1.0, 1.0
        if self.is_euclidean:
            s = np.linalg.svd(self.factor, compute_uv=False)
            return float(s.min()) * (1 - 1e-12), float(s.max()) * (1 + 1e-12)
        if self._fast_polyhedral or (self.is_polyhedral and isinstance(self, (Lp, WeightedLp))):
            try:
                F = self.functionals
                V = self.generators
                b = float(np.linalg.norm(F, axis=1).max())
                a = 1.0 / float(np.linalg.norm(V, axis=1).max())
                return a * (1 - 1e-12), b * (1 + 1e-12)
            except ph.PolyhedralTooLarge:
                pass
        return self._equivalence()

    def _equivalence(self) -> tuple[float, float]:
        raise NotImplementedError

    # -- convenience -----------------------------------------------------------
    def quotient(self, kernel) -> "Quotient":
        return Quotient(self, kernel)

    def pullback(self, M) -> "Pullback":
        return Pullback(self, M)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    raise TypeError(type(o))


def _p_json(p: float):
    return "inf" if p == INF else p


# ---------------------------------------------------------------------------
# leaves
# ---------------------------------------------------------------------------


class Lp(NormedSpace):
    """``l_p^n`` with ``1 <= p <= inf``."""

    def __init__(self, p, dim: int):
        self.p = parse_p(p)
        self.dim = int(dim)
        if self.dim < 0:
            raise ValueError("dimension must be non-negative")

    def __repr__(self):
        return f"Lp(p={self.p}, dim={self.dim})"

    @property
    def is_polyhedral(self):
        return self.p in (1.0, INF)

    @property
    def is_euclidean(self):
        return self.p == 2.0

    def dual(self):
        return Lp(conjugate(self.p), self.dim)

    def to_dict(self):
        return {"type": "lp", "p": _p_json(self.p), "dim": self.dim}

    def _rows(self, X):
        return _pnorm_rows(X, self.p)

    def norm(self, x):
        X, single = self._prep(x)
        v = _pnorm_rows(X, self.p)
        return float(v[0]) if single else v

    def _grad_rows(self, X):
        return _pnorm_grad_rows(X, self.p)

    def grad(self, x):
        X, _ = self._prep(x)
        return _pnorm_grad_rows(X, self.p)

    def _functionals(self):
        return ph.sign_vectors(self.dim) if self.p == 1.0 else np.eye(self.dim)

    def _generators(self):
        return np.eye(self.dim) if self.p == 1.0 else ph.sign_vectors(self.dim)

    def _factor(self):
        return np.eye(self.dim)

    def _equivalence(self):
        if self.p == INF:
            e = -0.5
        else:
            e = 1.0 / self.p - 0.5
        c = self.dim ** e
        return (min(1.0, c) * (1 - 1e-12), max(1.0, c) * (1 + 1e-12))


class WeightedLp(NormedSpace):
    """Weighted l_p norm ``||x|| = |w * x|_p`` with positive weights."""

    def __init__(self, p, weights):
        self.p = parse_p(p)
        self.weights = np.asarray(weights, dtype=float).ravel()
        if np.any(self.weights <= 0) or not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be positive and finite")
        self.dim = self.weights.size

    def __repr__(self):
        return f"WeightedLp(p={self.p}, weights={self.weights.tolist()})"

    @property
    def is_polyhedral(self):
        return self.p in (1.0, INF)

    @property
    def is_euclidean(self):
        return self.p == 2.0

    def dual(self):
        return WeightedLp(conjugate(self.p), 1.0 / self.weights)

    def to_dict(self):
        return {"type": "weighted_lp", "p": _p_json(self.p), "weights": self.weights.tolist()}

    def _rows(self, X):
        return _pnorm_rows(X * self.weights, self.p)

    def norm(self, x):
        X, single = self._prep(x)
        v = _pnorm_rows(X * self.weights, self.p)
        return float(v[0]) if single else v

    def _grad_rows(self, X):
        v, G = _pnorm_grad_rows(X * self.weights, self.p)
        return v, G * self.weights

    def grad(self, x):
        X, _ = self._prep(x)
        return self._grad_rows(X)

    def _functionals(self):
        return Lp(self.p, self.dim)._functionals() * self.weights

    def _generators(self):
        return Lp(self.p, self.dim)._generators() / self.weights

    def _factor(self):
        return np.diag(self.weights)

    def _equivalence(self):
        a, b = Lp(self.p, self.dim)._equivalence()
        return a * self.weights.min(), b * self.weights.max()


# ---------------------------------------------------------------------------
# composite nodes
# ---------------------------------------------------------------------------


class DirectSum(NormedSpace):
    """``(X_1 + ... + X_m)_p`` with norm ``|(|x_1|, ..., |x_m|)|_p``."""

    def __init__(self, summands, p):
        self.summands = tuple(summands)
        if not self.summands:
            raise ValueError("a direct sum needs at least one summand")
        self.p = parse_p(p)
        self.widths = [s.dim for s in self.summands]
        self.offsets = np.cumsum([0] + self.widths)
        self.dim = int(self.offsets[-1])

    def __repr__(self):
        return f"DirectSum(p={self.p}, summands={list(self.summands)})"

    @property
    def is_polyhedral(self):
        return self.p in (1.0, INF) and all(s.is_polyhedral for s in self.summands)

    @property
    def is_euclidean(self):
        return self.p == 2.0 and all(s.is_euclidean for s in self.summands)

    def dual(self):
        return DirectSum([s.dual() for s in self.summands], conjugate(self.p))

    def to_dict(self):
        return {"type": "direct_sum", "p": _p_json(self.p),
                "summands": [s.to_dict() for s in self.summands]}

    def blocks(self, X):
        return [X[:, self.offsets[i]:self.offsets[i + 1]] for i in range(len(self.summands))]

    def _rows(self, X):
        parts = np.column_stack([s.norm(B) if s.dim else np.zeros(X.shape[0])
                                 for s, B in zip(self.summands, self.blocks(X))])
        return _pnorm_rows(parts, self.p)

    def _bounds_rows(self, X):
        los, his = [], []
        for s, B in zip(self.summands, self.blocks(X)):
            lo, hi = s.norm_bounds(B) if s.dim else (np.zeros(X.shape[0]),) * 2
            los.append(lo)
            his.append(hi)
        return _pnorm_rows(np.column_stack(los), self.p), _pnorm_rows(np.column_stack(his), self.p)

    def _grad_rows(self, X):
        vals, grads = [], []
        for s, B in zip(self.summands, self.blocks(X)):
            v, g = s.grad(B)
            vals.append(v)
            grads.append(g)
        V = np.column_stack(vals)
        outer_v, outer_g = _pnorm_grad_rows(V, self.p)
        D = np.hstack([g * outer_g[:, [i]] for i, g in enumerate(grads)])
        return outer_v, D

    def _functionals(self):
        blocks = [s.functionals for s in self.summands]
        if self.p == INF:
            return ph.block_diag_rows(blocks, self.widths)
        return ph.product_rows(blocks, self.widths)

    def _generators(self):
        blocks = [s.generators for s in self.summands]
        if self.p == 1.0:
            return ph.block_diag_rows(blocks, self.widths)
        return ph.product_rows(blocks, self.widths)

    def _factor(self):
        return sla.block_diag(*[s.factor for s in self.summands])

    def _equivalence(self):
        m = len(self.summands)
        ab = [s.equivalence for s in self.summands]
        e = (0.0 if self.p == INF else 1.0 / self.p) - 0.5
        c = m ** e
        return min(a for a, _ in ab) * min(1.0, c), max(b for _, b in ab) * max(1.0, c)


class Pullback(NormedSpace):
    """``||x|| = ||M x||_parent`` for an injective matrix ``M``.

    Used for norms induced on subspaces and for norms given by an explicit
    finite list of functionals (the pullback of ``l_inf^N``).
    """

    def __init__(self, parent: NormedSpace, matrix):
        M = np.atleast_2d(np.asarray(matrix, dtype=float))
        if M.shape[0] != parent.dim:
            raise ValueError("pullback matrix rows must match the parent dimension")
        if M.shape[1] and np.linalg.matrix_rank(M) < M.shape[1]:
            raise ValueError("pullback matrix must be injective")
        self.parent = parent
        self.matrix = M
        self.dim = M.shape[1]

    def __repr__(self):
        return f"Pullback({self.parent!r}, shape={self.matrix.shape})"

    @property
    def is_polyhedral(self):
        return self.parent.is_polyhedral

    @property
    def is_euclidean(self):
        return self.parent.is_euclidean

    def dual(self):
        P, M = self.parent, self.matrix
        if M.shape[0] == M.shape[1]:
            return Pullback(P.dual(), np.linalg.inv(M).T)
        Wp = _orth(M)
        return Pullback(Quotient(P.dual(), _orth_complement(M)), np.linalg.inv(M.T @ Wp))

    def to_dict(self):
        return {"type": "pullback", "parent": self.parent.to_dict(), "matrix": self.matrix.tolist()}

    def _rows(self, X):
        return self.parent.norm(X @ self.matrix.T)

    def _bounds_rows(self, X):
        return self.parent.norm_bounds(X @ self.matrix.T)

    def _grad_rows(self, X):
        v, G = self.parent.grad(X @ self.matrix.T)
        return v, G @ self.matrix

    def _functionals(self):
        return ph.dedupe_symmetric(self.parent.functionals @ self.matrix)

    def _generators(self):
        return ph.polar_vertices(self.parent.functionals @ self.matrix)

    def _factor(self):
        return self.parent.factor @ self.matrix

    def _equivalence(self):
        a, b = self.parent.equivalence
        s = np.linalg.svd(self.matrix, compute_uv=False)
        return a * s.min(), b * s.max()


class Dual(NormedSpace):
    """Dual space of ``parent``; evaluates through syntactic dualisation."""

    def __init__(self, parent: NormedSpace):
        self.parent = parent
        self.dim = parent.dim

    def __repr__(self):
        return f"Dual({self.parent!r})"

    @property
    def is_polyhedral(self):
        return self.parent.is_polyhedral

    @property
    def is_euclidean(self):
        return self.parent.is_euclidean

    def dual(self):
        return self.parent

    @cached_property
    def resolved(self) -> NormedSpace:
        return self.parent.dual()

    def to_dict(self):
        return {"type": "dual", "parent": self.parent.to_dict()}

    def norm(self, x):
        return self.resolved.norm(x)

    def norm_bounds(self, x):
        return self.resolved.norm_bounds(x)

    def grad(self, x):
        return self.resolved.grad(x)

    def _rows(self, X):
        return self.resolved.norm(X)

    def _functionals(self):
        return self.parent.generators

    def _generators(self):
        return self.parent.functionals

    def _factor(self):
        return np.linalg.pinv(self.parent.factor).T

    def _equivalence(self):
        a, b = self.parent.equivalence
        return 1.0 / b, 1.0 / a


class Quotient(NormedSpace):
    """Quotient ``parent / span(kernel)``.

    Points are represented in coordinates ``q = W^T x`` where ``W`` is an
    orthonormal basis of the Euclidean complement of the kernel.  Evaluation
    accepts either quotient coordinates or parent-length representatives.
    """

    def __init__(self, parent: NormedSpace, kernel):
        K = getattr(kernel, "basis", kernel)
        K = np.asarray(K, dtype=float)
        if K.ndim == 1:
            K = K[:, None]
        if K.size == 0:
            K = np.zeros((parent.dim, 0))
        if K.shape[0] != parent.dim:
            raise ValueError("kernel vectors must live in the parent space")
        self.parent = parent
        self.kernel = _orth(K)
        self.W = _orth_complement(self.kernel)
        self.dim = self.W.shape[1]

    def __repr__(self):
        return f"Quotient({self.parent!r}, k={self.kernel.shape[1]})"

    @property
    def is_polyhedral(self):
        return self.parent.is_polyhedral

    @property
    def is_euclidean(self):
        return self.parent.is_euclidean

    def dual(self):
        return Pullback(self.parent.dual(), self.W)

    def to_dict(self):
        return {"type": "quotient", "parent": self.parent.to_dict(),
                "kernel": np.round(self.kernel, 12).tolist()}

    def coords(self, x) -> np.ndarray:
        """Map representatives to quotient coordinates (pass-through otherwise)."""
        X = np.asarray(x, dtype=float)
        if X.shape[-1] == self.parent.dim and self.kernel.shape[1] > 0:
            return X @ self.W
        return X

    def lift(self, q) -> np.ndarray:
        """Canonical representative ``W q`` of quotient coordinates."""
        return np.asarray(q, dtype=float) @ self.W.T

    def _prep(self, x):
        return super()._prep(self.coords(x))

    def _rows(self, X):
        return self._bounds_rows(X)[1]

    def _bounds_rows(self, X):
        from .distance import dist_bounds

        lo, hi, _ = dist_bounds(self.parent, X @ self.W.T, self.kernel)
        return lo, hi

    def _grad_rows(self, X):
        from .distance import dist_bounds

        lo, hi, C = dist_bounds(self.parent, X @ self.W.T, self.kernel)
        R = X @ self.W.T - C @ self.kernel.T
        _, G = self.parent.grad(R)
        return hi, G @ self.W

    def _functionals(self):
        return ph.polar_vertices(self.generators)

    def _generators(self):
        return ph.extreme_points(self.parent.generators @ self.W)

    def _factor(self):
        G = self.parent.factor
        GK = G @ self.kernel
        if GK.shape[1]:
            Q = _orth(GK)
            return (G - Q @ (Q.T @ G)) @ self.W
        return G @ self.W

    def _equivalence(self):
        return self.parent.equivalence


def from_functionals(F) -> Pullback:
    """Polyhedral norm ``max_i |F_i x|`` given by an explicit functional list."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    return Pullback(Lp(INF, F.shape[0]), F)


def from_dict(d: dict) -> NormedSpace:
    """Inverse of :meth:`NormedSpace.to_dict`."""
    t = d["type"]
    if t == "lp":
        return Lp(d["p"], d["dim"])
    if t == "weighted_lp":
        return WeightedLp(d["p"], d["weights"])
    if t == "direct_sum":
        return DirectSum([from_dict(s) for s in d["summands"]], d["p"])
    if t == "quotient":
        return Quotient(from_dict(d["parent"]), np.asarray(d["kernel"], dtype=float))
    if t == "dual":
        return Dual(from_dict(d["parent"]))
    if t == "pullback":
        return Pullback(from_dict(d["parent"]), np.asarray(d["matrix"], dtype=float))
    raise ValueError(f"unknown space type {t!r}")
