import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import subspace_angles

from banachgap import (Config, Lp, Method, Subspace, annihilator, borsuk_extremal, dg_metric,
                       example_310, example_314, hilbert_theta, inclination, lambda0, lambda_gap,
                       omega, omega0, theta, theta0)
from banachgap.suite import family_space, random_subspace


def _pair(seed, p=1.5, n=3, k=1):
    rng = np.random.default_rng(seed)
    X = Lp(p, n)
    return Subspace(X, rng.standard_normal((n, k))), Subspace(X, rng.standard_normal((n, k)))


def test_example_lines_exact():
    X, Y1, Y2, Y3, (t12, t13, t23) = example_310(0.5, 1.0)
    assert (t12, t13, t23) == (0.5, 1.0, pytest.approx(1 / 3))
    for (P, Q), e in (((Y1, Y2), t12), ((Y1, Y3), t13), ((Y2, Y3), t23)):
        r = theta(P, Q)
        assert r.method == Method.POLYHEDRAL_EXACT
        assert r.contains(e) and r.width <= 1e-9


def test_example_lines_sampled_path():
    X, Y1, Y2, Y3, exp = example_310(0.5, 1.0)
    cfg = Config(force_net=True)
    for (P, Q), e in zip(((Y1, Y2), (Y1, Y3), (Y2, Y3)), exp):
        r = theta(P, Q, cfg)
        assert r.contains(e, 1e-12) and r.width <= 6e-3


def test_example_lines_break_triangle():
    X, Y1, Y2, Y3, _ = example_310(0.5, 1.0)
    lhs = theta(Y1, Y2).upper + theta(Y2, Y3).upper
    assert lhs + 0.15 < theta(Y1, Y3).lower


def test_spherical_and_ball_openings_do_not_dualise():
    ex = example_314(0.5)
    (Y, Z), (Yp, Zp) = ex.primal, ex.dual
    prim, dual = ex.expected
    assert prim == pytest.approx(2 / 3) and dual == pytest.approx(0.5)
    for f in (omega, lambda_gap):
        a, b = f(Y, Z), f(Yp, Zp)
        assert a.contains(prim, 1e-9) and b.contains(dual, 1e-9)
        assert a.lower > b.upper


@pytest.mark.parametrize("seed", range(15))
def test_hilbert_matches_principal_angles(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    k = int(rng.integers(1, n))
    X = Lp(2, n)
    Y = Subspace(X, rng.standard_normal((n, k)))
    Z = Subspace(X, rng.standard_normal((n, k)))
    oracle = np.sin(subspace_angles(Y.basis, Z.basis).max())
    assert hilbert_theta(Y, Z) == pytest.approx(oracle, abs=1e-10)
    r = theta(Y, Z)
    assert abs(r.value - oracle) <= max(r.width, 1e-10)


def test_hilbert_unequal_dims_gives_one(rng):
    X = Lp(2, 4)
    Y = Subspace(X, rng.standard_normal((4, 2)))
    Z = Subspace(X, rng.standard_normal((4, 1)))
    assert hilbert_theta(Y, Z) == pytest.approx(1.0)
    assert theta(Y, Z).contains(1.0, 1e-9)


def test_trivial_subspaces():
    X = Lp(1.5, 3)
    Y = Subspace(X, np.eye(3)[:, :1])
    zero = Subspace(X, np.zeros((3, 0)))
    full = Subspace(X, np.eye(3))
    assert theta0(zero, Y).value == 0.0
    assert theta0(Y, zero).value == 1.0
    assert theta0(Y, full).value == 0.0


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.sampled_from(["l1", "l2", "linf", "mixed"]))
def test_opening_axioms(seed, fam):
    rng = np.random.default_rng(seed)
    X = family_space(fam, 3, rng)
    Y, Z = random_subspace(X, 1, rng), random_subspace(X, 1, rng)
    t, w, lam = theta(Y, Z), omega(Y, Z), lambda_gap(Y, Z)
    for r in (t, w, lam):
        assert r.lower <= r.upper + 1e-12
    assert -1e-12 <= t.lower and t.upper <= 1 + 1e-12
    assert -1e-12 <= lam.lower and lam.upper <= 1 + 1e-12
    assert t.lower <= w.upper + 1e-9
    assert w.lower <= 2 * t.upper + 1e-9
    ts = theta(Z, Y)
    assert ts.lower <= t.upper + 1e-9 and t.lower <= ts.upper + 1e-9


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_gap_metric_triangle(seed):
    rng = np.random.default_rng(seed)
    X = Lp(1.5, 3)
    Y1, Y2, Y3 = (random_subspace(X, 1, rng) for _ in range(3))
    assert dg_metric(Y1, Y3) <= dg_metric(Y1, Y2) + dg_metric(Y2, Y3) + 1e-6


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("p", [1.0, 2.0, np.inf])
def test_one_sided_opening_duality(seed, p):
    rng = np.random.default_rng(seed)
    X = Lp(p, 3)
    Y = random_subspace(X, 1, rng)
    Z = random_subspace(X, int(rng.integers(1, 3)), rng)
    a = theta0(Y, Z)
    b = theta0(annihilator(Z), annihilator(Y))
    assert a.lower <= b.upper + 1e-9 and b.lower <= a.upper + 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_bigger_subspace_is_far(seed):
    rng = np.random.default_rng(seed)
    X = Lp([1.0, 1.5, np.inf][seed % 3], 3)
    Y, Z = random_subspace(X, 2, rng), random_subspace(X, 1, rng)
    x, r = borsuk_extremal(Y, Z)
    assert r.value >= 1 - r.mesh - 1e-6
    assert X.norm(x[None])[0] == pytest.approx(1.0)


def test_ball_opening_bounds(rng):
    Y, Z = _pair(3)
    t, lam = theta0(Y, Z), lambda0(Y, Z)
    assert lam.lower <= t.upper + 1e-9
    assert omega0(Y, Z).upper <= 2 * t.upper + 1e-9


def test_inclination_of_complement():
    X = Lp(1, 2)
    Y = Subspace(X, [[1.0], [0.0]])
    Z = Subspace(X, [[0.0], [1.0]])
    assert inclination(Z, Y).contains(1.0, 1e-9)
    assert inclination(Y, Y).contains(0.0, 1e-9)


def test_theta_is_zero_on_same_subspace(rng):
    X = Lp(1.5, 4)
    Y = Subspace(X, rng.standard_normal((4, 2)))
    Z = Subspace(X, Y.basis @ np.array([[2.0, 1.0], [0.0, 1.0]]))
    assert theta(Y, Z).lower <= 1e-9
    assert theta(Y, Z).upper <= 0.05
