import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from banachgap import DirectSum, Dual, Lp, WeightedLp, from_dict, from_functionals
from banachgap.norms import conjugate, parse_p

P_VALUES = [1.0, 1.2, 1.5, 2.0, 3.0, np.inf]
vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False))


@pytest.mark.parametrize("p", P_VALUES)
def test_lp_norm_matches_numpy(p, rng):
    X = rng.standard_normal((50, 4))
    np.testing.assert_allclose(Lp(p, 4).norm(X), np.linalg.norm(X, ord=p, axis=1), rtol=1e-12)


@pytest.mark.parametrize("p", P_VALUES)
def test_dual_of_lp_is_conjugate(p, rng):
    X = Lp(p, 3)
    F = rng.standard_normal((20, 3))
    q = conjugate(p)
    np.testing.assert_allclose(X.dual_norm(F), np.linalg.norm(F, ord=q, axis=1), rtol=1e-9)


def test_conjugate_exponents():
    assert conjugate(1.0) == np.inf
    assert conjugate(np.inf) == 1.0
    assert conjugate(2.0) == pytest.approx(2.0)
    assert conjugate(1.5) == pytest.approx(3.0)


@pytest.mark.parametrize("bad", [0.5, 0.0, -1, "abc", float("nan")])
def test_parse_p_rejects(bad):
    with pytest.raises(ValueError):
        parse_p(bad)


@pytest.mark.parametrize("raw,val", [("inf", np.inf), (1, 1.0), ("2", 2.0), (1.5, 1.5)])
def test_parse_p_accepts(raw, val):
    assert parse_p(raw) == val


@given(vec3, vec3, st.sampled_from(P_VALUES))
def test_norm_axioms(x, y, p):
    X = Lp(p, 3)
    nx, ny, nxy = X.norm(x[None])[0], X.norm(y[None])[0], X.norm((x + y)[None])[0]
    assert nxy <= nx + ny + 1e-9 * (1 + nx + ny)
    assert X.norm((-2.5 * x)[None])[0] == pytest.approx(2.5 * nx, rel=1e-12, abs=1e-12)


@given(vec3, vec3, st.sampled_from(P_VALUES))
def test_holder_pairing(x, f, p):
    X = Lp(p, 3)
    assert abs(f @ x) <= X.dual_norm(f[None])[0] * X.norm(x[None])[0] + 1e-9


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, np.inf])
def test_norm_bounds_bracket(p, rng):
    X = DirectSum([Lp(p, 2), Lp(2, 2)], p=1.0)
    V = rng.standard_normal((30, 4))
    lo, hi = X.norm_bounds(V)
    n = X.norm(V)
    assert np.all(lo <= n + 1e-12) and np.all(n <= hi + 1e-12)


def test_direct_sum_norm(rng):
    X = DirectSum([Lp(1, 2), Lp(np.inf, 2)], p=2.0)
    V = rng.standard_normal((10, 4))
    expect = np.hypot(np.abs(V[:, :2]).sum(1), np.abs(V[:, 2:]).max(1))
    np.testing.assert_allclose(X.norm(V), expect, rtol=1e-12)


def test_weighted_lp(rng):
    w = np.array([1.0, 2.0, 0.5])
    X = WeightedLp(1.5, w)
    V = rng.standard_normal((10, 3))
    np.testing.assert_allclose(X.norm(V), np.linalg.norm(V * w, ord=1.5, axis=1), rtol=1e-12)


def test_from_functionals_gives_max_norm(rng):
    F = rng.standard_normal((7, 3))
    X = from_functionals(F)
    V = rng.standard_normal((10, 3))
    np.testing.assert_allclose(X.norm(V), np.abs(V @ F.T).max(1), rtol=1e-12)


def test_double_dual_norm(rng):
    X = DirectSum([Lp(1.5, 2), Lp(np.inf, 1)], p=1.0)
    V = rng.standard_normal((10, 3))
    np.testing.assert_allclose(Dual(Dual(X)).norm(V), X.norm(V), rtol=1e-7)


@pytest.mark.parametrize("space", [
    Lp(1.5, 3), WeightedLp(2.0, [1.0, 3.0]), DirectSum([Lp(1, 2), Lp(2, 1)], p=np.inf)])
def test_descriptor_roundtrip(space, rng):
    Y = from_dict(space.to_dict())
    assert Y.fingerprint() == space.fingerprint()
    V = rng.standard_normal((5, space.dim))
    np.testing.assert_allclose(Y.norm(V), space.norm(V))


@pytest.mark.parametrize("p", [1.2, 2.0, 3.0])
def test_gradient_is_norming(p, rng):
    X = Lp(p, 4)
    V = rng.standard_normal((20, 4))
    v, G = X.grad(V)
    np.testing.assert_allclose(np.einsum("ij,ij->i", G, V), v, rtol=1e-10)
    np.testing.assert_allclose(X.dual_norm(G), 1.0, rtol=1e-9)


def test_polyhedral_flags():
    assert Lp(1, 3).is_polyhedral and Lp(np.inf, 3).is_polyhedral
    assert not Lp(2, 3).is_polyhedral
    assert Lp(2, 3).is_euclidean
