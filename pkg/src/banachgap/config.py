"""Numerical settings shared by every computation."""

from __future__ import annotations

from dataclasses import dataclass, replace


class BudgetExceeded(RuntimeError):
    """A net or search would exceed the configured point budget."""


@dataclass(frozen=True)
class Config:
    """Tolerances, seeds and budgets.

    Attributes
    ----------
    mesh : float or None
        Target width for certified net enclosures.  ``None`` selects
        ``1e-2`` for subspaces of dimension at most 2 and ``2e-2`` above.
    tol : float
        Slack used when comparing exact quantities.
    seed : int
        Seed for every random choice (multistart, sampling).
    restarts : int
        Number of multistart restarts in non-convex searches.
    budget : int
        Maximum number of point evaluations for one net computation.
    force_net : bool
        Bypass closed-form and polyhedral routes (used for cross-checks).
    strict_budget : bool
        Raise :class:`BudgetExceeded` when a certified search stops on the
        budget instead of returning the wider enclosure reached so far.
    """

    mesh: float | None = None
    tol: float = 1e-9
    seed: int = 1
    restarts: int = 64
    budget: int = 400_000
    force_net: bool = False
    strict_budget: bool = False

    def mesh_for(self, k: int) -> float:
        if self.mesh is not None:
            return float(self.mesh)
        return 1e-2 if k <= 2 else 2e-2

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


DEFAULT = Config()
