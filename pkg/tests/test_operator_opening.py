import numpy as np
import pytest

from banachgap import (Lp, Subspace, dop_metric, hilbert_theta, inverse_bound_check, lambda_proj,
                       minimal_projection, op_norm, prop53_check, r0_bounds, r_bounds, theta0)
from banachgap.suite import near_subspace, random_subspace


@pytest.mark.parametrize("seed", range(6))
def test_r0_in_hilbert_space_equals_gap(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 4
    k = 1 + seed % (n - 1)
    X = Lp(2, n)
    Y, Z = Subspace(X, rng.standard_normal((n, k))), Subspace(X, rng.standard_normal((n, k)))
    t = hilbert_theta(Y, Z)
    r = r0_bounds(Y, Z)
    assert r.lower - 1e-9 <= t <= r.upper + 1e-9
    assert r.width <= 5e-3


@pytest.mark.parametrize("p", [1.0, 1.5, np.inf])
@pytest.mark.parametrize("seed", range(3))
def test_r0_witness_is_valid(p, seed):
    rng = np.random.default_rng(seed)
    X = Lp(p, 3)
    Y = random_subspace(X, 1 + seed % 2, rng)
    Z = near_subspace(Y, 0.1, rng)
    r = r0_bounds(Y, Z)
    assert r.lower <= r.upper + 1e-12
    assert theta0(Y, Z).lower <= r.upper + 1e-9
    if r.witness is not None:
        C = r.witness
        img = Subspace(X, C @ Y.basis)
        assert img.same_span(Z, 1e-7)
        assert op_norm(C - np.eye(3), X, X).upper <= r.upper + 1e-7


def test_r_is_symmetric_max(rng):
    X = Lp(1, 3)
    Y = random_subspace(X, 1, rng)
    Z = near_subspace(Y, 0.2, rng)
    a, b, r = r0_bounds(Y, Z), r0_bounds(Z, Y), r_bounds(Y, Z)
    assert r.upper >= max(a.lower, b.lower) - 1e-9
    assert dop_metric(Y, Z) == pytest.approx(dop_metric(Z, Y), abs=1e-6)


def test_inverse_bound(rng):
    X = Lp(1.5, 3)
    Y = random_subspace(X, 2, rng)
    Z = near_subspace(Y, 0.05, rng)
    rep = inverse_bound_check(Y, Z)
    assert rep.check.status == "pass"


def test_projection_constant_of_hyperplane_in_linf3():
    Y = Subspace(Lp(np.inf, 3), np.array([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]).T)
    assert lambda_proj(Y).contains(4 / 3, 1e-8)


@pytest.mark.parametrize("p", [1.0, 1.5, np.inf])
def test_lines_are_one_complemented(p, rng):
    Y = Subspace(Lp(p, 3), rng.standard_normal((3, 1)))
    lam, P = minimal_projection(Y)
    assert lam.contains(1.0, 1e-8)
    np.testing.assert_allclose(P @ P, P, atol=1e-9)
    np.testing.assert_allclose(P @ Y.basis, Y.basis, atol=1e-9)


def test_orthogonal_projection_in_l2(rng):
    Y = Subspace(Lp(2, 4), rng.standard_normal((4, 2)))
    assert lambda_proj(Y).contains(1.0, 1e-8)


@pytest.mark.parametrize("seed", range(4))
def test_projection_estimate(seed):
    rng = np.random.default_rng(seed)
    X = Lp([1.0, np.inf, 1.5, 2.0][seed], 3)
    Y = random_subspace(X, 1, rng)
    Z = near_subspace(Y, 0.05, rng)
    assert prop53_check(Y, Z).check.status != "fail"
