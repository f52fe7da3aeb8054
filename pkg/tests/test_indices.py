import numpy as np
import pytest

from banachgap import DirectSum, Lp, build_index_set, h_index, prop621_check
from banachgap.indices import Family, inner_minimum
from banachgap.suite import near_subspace, random_subspace

SPACES = [Lp(1, 2), Lp(2, 2), Lp(np.inf, 2), Lp(1.5, 3), DirectSum([Lp(1, 2), Lp(np.inf, 1)], 1)]


@pytest.mark.parametrize("X", SPACES, ids=repr)
def test_packing_two_gives_one(X):
    h = h_index(X, build_index_set("PackingD", m=2))
    assert h.lower == 1.0 and h.upper == 1.0


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0])
@pytest.mark.parametrize("m", [2, 3])
def test_disjoint_support_witness(p, m):
    h = h_index(Lp(p, m), build_index_set("PackingD", m=m))
    assert h.lower >= 2 ** (1 / p) / 2 - 1e-9
    assert h.upper <= 1.0


def test_witness_attains_lower_bound():
    X = Lp(1.5, 3)
    A = build_index_set("PackingD", m=3)
    h = h_index(X, A)
    lo, _ = inner_minimum(X, A, h.witness)
    assert lo >= h.lower - 1e-9
    assert np.all(X.norm(h.witness) <= 1 + 1e-12)


def test_index_set_construction():
    A = build_index_set("PackingD", m=3)
    assert A.family_tag is Family.PACKING_D and A.gamma_size == 3
    assert len(A.vectors) == 3
    np.testing.assert_allclose(np.abs(A.vectors).sum(1), 1.0)
    with pytest.raises(ValueError):
        build_index_set("PackingD")
    with pytest.raises(ValueError):
        build_index_set("NoSuchFamily", m=2)


@pytest.mark.parametrize("tag,params", [("FullSphere", {"m": 2}), ("ReflexivityR", {"m": 3}),
                                        ("GiesyBlock", {"nmax": 2}), ("JamesBlock", {"nmax": 2}),
                                        ("BeauzamyTail", {"m": 3})])
def test_families_have_unit_vectors(tag, params):
    A = build_index_set(tag, **params)
    np.testing.assert_allclose(np.abs(A.vectors).sum(1), 1.0)
    h = h_index(Lp(1.5, 2), A)
    assert 0 <= h.lower <= h.upper <= 1 + 1e-12


def test_enlarging_family_cannot_raise_index():
    X = Lp(1.5, 3)
    small = build_index_set("PackingD", m=3)
    big = build_index_set("Custom", vectors=[tuple(v) for v in small.vectors] + [(1, 0, 0)])
    hb = h_index(X, big, mode="vectors")
    hs = h_index(X, small, mode="vectors", seeds=[hb.witness])
    assert hb.lower <= hs.lower + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_subspace_inequalities(seed):
    rng = np.random.default_rng(seed)
    X = Lp([1.0, 1.5, 2.0, np.inf, 1.2][seed], 3)
    Y = random_subspace(X, 2, rng)
    Z = near_subspace(Y, 0.3, rng)
    rep = prop621_check(Y, Z, build_index_set("PackingD", m=2))
    assert rep.ok
