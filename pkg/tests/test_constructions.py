import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from banachgap import (Lp, Subspace, bm_upper, douady_pair, estimate_642, example_310, example_314,
                       identity_642, identity_map, kadets_bound, kadets_glue, mazur_maps, theta)


def test_example_inputs_validated():
    with pytest.raises(ValueError):
        example_310(0.6, 0.5)
    with pytest.raises(ValueError):
        example_314(1.0)


@given(st.floats(0.05, 0.9), st.floats(0.01, 0.09))
def test_example_lines_closed_form(a, d):
    b = min(1.0, a + d)
    _, Y1, Y2, Y3, (e12, e13, e23) = example_310(a, b)
    assert theta(Y2, Y3).contains(e23, 1e-12)
    assert theta(Y1, Y2).contains(e12, 1e-12)


@pytest.mark.parametrize("p", [1.0, 2.0])
@pytest.mark.parametrize("eps", [0.1, 0.25])
def test_douady_pair(p, eps, rng):
    X = Lp(p, 3)
    Y = Subspace(X, rng.standard_normal((3, 1)))
    pair = douady_pair(X, Y, eps)
    assert pair.G0.dim == pair.Geps.dim == 3
    up, inv = pair.tau_bounds(X)
    assert up <= 1 + eps + 1e-12
    assert inv <= 1 / eps + 1e-9
    assert theta(pair.G0, pair.Geps).upper <= eps + 0.05


def test_douady_rejects_bad_eps():
    X = Lp(1, 2)
    with pytest.raises(ValueError):
        douady_pair(X, Subspace(X, [[1.0], [0.0]]), 1.5)


@pytest.mark.parametrize("p", [1.0, 1.2, 1.5, 1.9, 2.0])
def test_mazur_maps_preserve_spheres(p, rng):
    T, D = mazur_maps(p, 4)
    U = rng.standard_normal((50, 4))
    U /= np.linalg.norm(U, axis=1)[:, None]
    np.testing.assert_allclose(T.target.norm(T(U)), 1.0, atol=1e-12)
    np.testing.assert_allclose(D.target.norm(D(U)), 1.0, atol=1e-12)


@pytest.mark.parametrize("p", [1.2, 1.5, 1.9])
def test_mazur_modulus_is_valid(p, rng):
    T, D = mazur_maps(p, 3)
    U = rng.standard_normal((400, 3))
    U /= np.linalg.norm(U, axis=1)[:, None]
    V = U + 0.05 * rng.standard_normal(U.shape)
    V /= np.linalg.norm(V, axis=1)[:, None]
    eta = np.linalg.norm(U - V, axis=1)
    for f in (T, D):
        moved = f.target.norm(f(U) - f(V))
        assert np.all(moved <= np.array([f.modulus(e) for e in eta]) + 1e-12)


def test_kadets_bound_formula():
    for p in (1.2, 1.5, 1.9):
        assert kadets_bound(p) == pytest.approx(2 * (2 / p - 1))
    assert kadets_bound(2.0) == pytest.approx(0.0)


def test_kadets_glue_small():
    T, D = mazur_maps(1.5, 2)
    _, Ys, Zs, rep = kadets_glue(Lp(2, 2), Lp(1.5, 2), T, D, mesh=0.04, dual_mesh=0.04,
                                 direct_omega=True)
    assert rep.kbound <= kadets_bound(1.5) + 1e-6
    assert rep.omega.upper <= rep.kbound + rep.net_slack + 1e-9
    assert rep.kbound <= rep.kbound_upper


def test_kadets_glue_identity_gives_zero():
    X = Lp(1.5, 2)
    I = identity_map(X)
    _, _, _, rep = kadets_glue(X, X, I, identity_map(X.dual_space), mesh=0.1, dual_mesh=0.1)
    assert rep.kbound <= 1e-12


@pytest.mark.parametrize("b", np.linspace(0, 1, 7))
@pytest.mark.parametrize("eps", [0.01, 0.3, 0.99])
def test_grid_identity(b, eps):
    assert identity_642(eps, float(b)) == pytest.approx(max(1 - b, b + eps), abs=1e-12)


def test_grid_identity_special_value():
    a = math.sqrt(2) - 1
    assert identity_642(a, a * a) == pytest.approx(2 * math.sqrt(2) - 2, abs=1e-12)


def test_truncated_estimate():
    with pytest.raises(ValueError):
        estimate_642(N=1)
    e = estimate_642(N=2, grid=8, exact=False)
    assert e.y0_witness == pytest.approx(e.expected, abs=1e-12)
    assert e.z_norm <= 1 + 1e-12


def test_douady_pair_isomorphic_to_ambient_within_bound():
    X = Lp(1, 3)
    pair = douady_pair(X, Subspace(X, [[1.0], [0.0], [0.0]]), 0.1)
    assert bm_upper(pair.Geps.induced, X, seeds=[np.eye(3)]) <= 11 + 1e-9
