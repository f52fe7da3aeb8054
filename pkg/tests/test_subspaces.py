import numpy as np
import pytest

from banachgap import BudgetExceeded, Config, Lp, Subspace, annihilator, certified_extremum, sphere_net
from banachgap.subspaces import membership


def test_rank_deficient_basis_rejected():
    with pytest.raises(ValueError):
        Subspace(Lp(2, 3), np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))


def test_span_and_membership():
    Y = Subspace.span(Lp(1, 3), [1, 0, 0], [0, 1, 1])
    assert Y.dim == 2 and Y.ambient_dim == 3
    assert membership(Y, np.array([2.0, 3.0, 3.0]))
    assert not membership(Y, np.array([0.0, 1.0, 0.0]))


def test_annihilator_kills_subspace(rng):
    X = Lp(1.5, 4)
    Y = Subspace(X, rng.standard_normal((4, 2)))
    A = annihilator(Y)
    assert A.dim == 2
    np.testing.assert_allclose(A.basis.T @ Y.basis, 0.0, atol=1e-12)
    np.testing.assert_allclose(A.space.norm(np.eye(4)), Lp(3.0, 4).norm(np.eye(4)))


def test_double_annihilator_is_same_span(rng):
    Y = Subspace(Lp(1, 4), rng.standard_normal((4, 2)))
    AA = annihilator(annihilator(Y))
    assert AA.same_span(Y) and Y.same_span(AA)


@pytest.mark.parametrize("p", [1.0, 2.0, np.inf])
def test_net_points_are_unit_and_cover(p, rng):
    X = Lp(p, 3)
    Y = Subspace(X, rng.standard_normal((3, 2)))
    net = sphere_net(Y, 0.2)
    np.testing.assert_allclose(X.norm(net.points), 1.0, atol=1e-12)
    probes = Y.basis @ rng.standard_normal((2, 2000))
    probes = (probes / X.norm(probes.T)).T
    d = np.array([X.norm(net.points - q).min() for q in probes])
    assert d.max() <= net.mesh + 1e-12


def test_net_budget_raises():
    Y = Subspace(Lp(2, 5), np.eye(5)[:, :4])
    with pytest.raises(BudgetExceeded):
        sphere_net(Y, 1e-3, budget=1000)


@pytest.mark.parametrize("mode,expect", [("sup", 1.0), ("inf", 0.0)])
def test_certified_extremum_on_coordinate(mode, expect):
    X = Lp(2, 3)
    Y = Subspace(X, np.eye(3)[:, :2])
    ev = lambda P: (np.abs(P[:, 0]), np.abs(P[:, 0]))
    ext = certified_extremum(Y, ev, 1e-3, mode)
    assert ext.lower - 1e-12 <= expect <= ext.upper + 1e-12
    assert ext.upper - ext.lower <= 1e-3 + 1e-12


def test_certified_extremum_strict_budget():
    Y = Subspace(Lp(1.5, 4), np.eye(4)[:, :3])
    ev = lambda P: (np.abs(P[:, 0]), np.abs(P[:, 0]))
    with pytest.raises(BudgetExceeded):
        certified_extremum(Y, ev, 1e-6, "sup", cfg=Config(budget=500, strict_budget=True))
