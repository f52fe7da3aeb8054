"""Subspaces, annihilators and certified nets on unit spheres.

Nets live on the Euclidean parameter sphere of an orthonormal basis ``Q``
of the subspace and are organised as cells on the faces of the cube
``[-1, 1]^k``.  A cell with centre ``v`` and Euclidean radius ``r`` maps
into the ambient ball of radius ``2 beta r / ||Q v||`` around the
normalised image of its centre, where ``beta`` bounds ``||Q u||`` over the
Euclidean unit sphere.  That bound certifies every enclosure built here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT, BudgetExceeded, Config
from .norms import Dual, NormedSpace, Pullback


class Subspace:
    """Linear subspace ``span(basis)`` of a normed space.

    Parameters
    ----------
    space : NormedSpace
    basis : (d, k) array
        Linearly independent columns.  ``k = 0`` gives the zero subspace.
    """

    def __init__(self, space: NormedSpace, basis, rank_tol: float = 1e-10):
        B = np.asarray(basis, dtype=float)
        if B.size == 0:
            B = np.zeros((space.dim, 0))
        if B.ndim == 1:
            B = B[:, None]
        if B.shape[0] != space.dim:
            raise ValueError(f"basis vectors must have length {space.dim}")
        if B.shape[1]:
            s = np.linalg.svd(B, compute_uv=False)
            if s.min() <= rank_tol * max(1.0, s.max()):
                raise ValueError("basis vectors are linearly dependent")
        self.space = space
        self.basis = B

    @classmethod
    def span(cls, space: NormedSpace, *vectors) -> "Subspace":
        """Subspace spanned by the given vectors."""
        if not vectors:
            return cls(space, np.zeros((space.dim, 0)))
        return cls(space, np.column_stack([np.asarray(v, dtype=float) for v in vectors]))

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.space.dim

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.space!r})"

    @cached_property
    def orth(self) -> np.ndarray:
        """Euclidean-orthonormal basis of the same span."""
        if self.dim == 0:
            return self.basis.copy()
        return sla.orth(self.basis)

    @cached_property
    def induced(self) -> Pullback:
        """The subspace as a normed space in the coordinates of ``basis``."""
        return Pullback(self.space, self.basis)

    @cached_property
    def param_space(self) -> Pullback:
        """The subspace in coordinates of :attr:`orth`."""
        return Pullback(self.space, self.orth)

    @cached_property
    def quotient(self):
        from .distance import quotient_of

        return quotient_of(self.space, self.basis)

    def contains(self, x, tol: float = 1e-9) -> bool:
        """Euclidean membership test ``|x - P x|_2 <= tol |x|_2``."""
        x = np.asarray(x, dtype=float)
        Q = self.orth
        r = x - Q @ (Q.T @ x)
        return bool(np.linalg.norm(r) <= tol * max(1.0, np.linalg.norm(x)))

    def same_span(self, other: "Subspace", tol: float = 1e-9) -> bool:
        if self.dim != other.dim:
            return False
        return all(self.contains(v, tol) for v in other.basis.T)

    def same_space(self, other: "Subspace") -> bool:
        return self.space is other.space or (
            self.space.dim == other.space.dim
            and self.space.fingerprint() == other.space.fingerprint())

    def dist(self, X, tol: float = 1e-10):
        """Bounds on the distance of each row of ``X`` to this subspace."""
        from .distance import dist_bounds

        lo, hi, _ = dist_bounds(self.space, X, self.basis, tol=tol)
        return lo, hi


def annihilator(Z: Subspace) -> Subspace:
    """``Z^perp``, a subspace of the dual space with the pairing ``f . x``."""
    N = sla.null_space(Z.basis.T) if Z.dim else np.eye(Z.ambient_dim)
    return Subspace(Dual(Z.space), N)


def membership(Y: Subspace, x, tol: float = 1e-9) -> bool:
    """Whether ``x`` lies in ``Y`` up to relative Euclidean tolerance."""
    return Y.contains(x, tol)


# ---------------------------------------------------------------------------
# cube-face cells on the parameter sphere
# ---------------------------------------------------------------------------


@dataclass
class Cells:
    """Cells on faces of ``[-1, 1]^k``: centres and common half-width."""

    centres: np.ndarray
    half: float
    k: int

    @property
    def radius(self) -> float:
        return self.half * np.sqrt(self.k - 1)

    def split(self, mask=None) -> "Cells":
        C = self.centres if mask is None else self.centres[mask]
        k = self.k
        fixed = np.argmax(np.abs(C), axis=1)
        h = self.half / 2
        offs = np.array(list(itertools.product((-h, h), repeat=k - 1)))
        # scatter the (k-1)-dimensional offsets into the free coordinates
        free = np.array([[j for j in range(k) if j != f] for f in range(k)])
        full = np.zeros((k, offs.shape[0], k))
        for f in range(k):
            full[f][:, free[f]] = offs
        out = C[:, None, :] + full[fixed]
        return Cells(out.reshape(-1, k), h, k)


def initial_cells(k: int, per_side: int = 2) -> Cells:
    """Uniform cells covering the faces of ``[-1, 1]^k``."""
    if k < 2:
        raise ValueError("cells need k >= 2")
    h = 1.0 / per_side
    grid = -1 + h + 2 * h * np.arange(per_side)
    tails = np.array(list(itertools.product(grid, repeat=k - 1)))
    out = []
    for axis in range(k):
        for s in (1.0, -1.0):
            block = np.insert(tails, axis, s, axis=1)
            out.append(block)
    return Cells(np.vstack(out), h, k)


@dataclass
class SphereNet:
    """Points on the unit sphere of a subspace with a certified covering radius."""

    points: np.ndarray
    mesh: float


class ParamSphere:
    """Parameterisation ``v -> Q v / ||Q v||`` of the unit sphere of ``Y``."""

    def __init__(self, Y: Subspace):
        self.Y = Y
        self.Q = Y.orth
        self.k = Y.dim
        self.pspace = Y.param_space
        a, b = self.pspace.equivalence
        self.alpha, self.beta = a, b

    def embed(self, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Normalised ambient points and certified lower norms of ``Q v``."""
        P = V @ self.Q.T
        lo, hi = self.Y.space.norm_bounds(P)
        return P / hi[:, None], lo

    def image_radius(self, glo: np.ndarray, r: float) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.where(glo > 0, 2.0 * self.beta * r / glo, np.inf)


def sphere_net(Y: Subspace, mesh: float, budget: int | None = None) -> SphereNet:
    """Net of ``S(Y)`` whose certified ambient covering radius is at most ``mesh``."""
    budget = DEFAULT.budget if budget is None else budget
    if Y.dim == 0:
        return SphereNet(np.zeros((0, Y.ambient_dim)), 0.0)
    ps = ParamSphere(Y)
    if Y.dim == 1:
        P, _ = ps.embed(np.array([[1.0], [-1.0]]))
        return SphereNet(P, 0.0)
    # uniform level: radius r with 2 beta r / alpha <= mesh
    r = mesh * ps.alpha / (2 * ps.beta)
    k = Y.dim
    per_side = max(1, int(np.ceil(np.sqrt(k - 1) / r)))
    count = 2 * k * per_side ** (k - 1)
    if count > budget:
        raise BudgetExceeded(f"net of a {k}-dimensional sphere at mesh {mesh:g} needs {count} points")
    cells = initial_cells(k, per_side)
    P, _ = ps.embed(cells.centres)
    return SphereNet(P, mesh)


@dataclass
class Extremum:
    """Certified enclosure of a sup or inf over a unit sphere."""

    lower: float
    upper: float
    point: np.ndarray
    evaluations: int
    converged: bool
    mesh: float


Evaluator = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def certified_extremum(Y: Subspace, evaluate: Evaluator, target: float, mode: str = "sup",
                       lipschitz: float = 1.0, cfg: Config = DEFAULT) -> Extremum:
    """Branch-and-bound enclosure of ``sup`` or ``inf`` of ``f`` over ``S(Y)``.

    Parameters
    ----------
    evaluate : callable
        Maps rows of unit vectors to elementwise bounds ``(lo, hi)`` on ``f``.
    target : float
        Requested width ``upper - lower``.
    lipschitz : float
        Lipschitz constant of ``f`` with respect to the ambient norm.
    """
    if mode not in ("sup", "inf"):
        raise ValueError(mode)
    sgn = 1.0 if mode == "sup" else -1.0
    if Y.dim == 0:
        raise ValueError("the unit sphere of the zero subspace is empty")
    ps = ParamSphere(Y)
    if Y.dim == 1:
        P, _ = ps.embed(np.array([[1.0], [-1.0]]))
        lo, hi = evaluate(P)
        if mode == "sup":
            i = int(np.argmax(lo))
            return Extremum(float(lo.max()), float(hi.max()), P[i], 2, True, 0.0)
        i = int(np.argmin(hi))
        return Extremum(float(lo.min()), float(hi.min()), P[i], 2, True, 0.0)

    cells = initial_cells(Y.dim, 2)
    evals = 0
    best_val = -np.inf
    best_pt = None
    leaves_bound = []   # bounds of discarded leaves (certified side)
    converged = True
    while True:
        P, glo = ps.embed(cells.centres)
        lo, hi = evaluate(P)
        evals += P.shape[0]
        om = lipschitz * ps.image_radius(glo, cells.radius)
        # certified side: for sup the upper bound, for inf the lower bound
        if mode == "sup":
            inner, outer = lo, hi + om
        else:
            inner, outer = -hi, -(lo - om)
        i = int(np.argmax(inner))
        if inner[i] > best_val:
            best_val = float(inner[i])
            best_pt = P[i]
        need = outer > best_val + target
        leaves_bound.append(float(outer[~need].max()) if (~need).any() else -np.inf)
        if not need.any():
            break
        nxt = int(need.sum()) * 2 ** (Y.dim - 1)
        if evals + nxt > cfg.budget:
            if cfg.strict_budget:
                raise BudgetExceeded(f"certified search needs more than {cfg.budget} evaluations")
            leaves_bound.append(float(outer[need].max()))
            converged = False
            break
        cells = cells.split(need)
    cert = max(max(leaves_bound), best_val)
    if mode == "sup":
        lower, upper = best_val, cert
    else:
        lower, upper = -cert, -best_val
    return Extremum(lower, upper, best_pt, evals, converged, upper - lower)
