import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from banachgap import Lp, LinearMap, markus_check, min_modulus, op_norm, regular_type_demo
from banachgap.operators import lower_modulus


def test_identity_on_l1():
    assert op_norm(np.eye(3), Lp(1, 3), Lp(1, 3)).contains(1.0, 1e-12)


def test_diagonal_on_linf():
    assert op_norm(np.diag([2.0, 3.0]), Lp(np.inf, 2), Lp(np.inf, 2)).contains(3.0, 1e-12)


def test_zero_map():
    r = op_norm(np.zeros((2, 3)), Lp(1.5, 3), Lp(2, 2))
    assert r.lower == 0.0 and r.upper <= 1e-12


@given(st.integers(0, 10_000))
def test_l1_norm_is_max_column_sum(seed):
    A = np.random.default_rng(seed).standard_normal((3, 3))
    r = op_norm(A, Lp(1, 3), Lp(1, 3))
    assert r.contains(np.abs(A).sum(0).max(), 1e-9)


@given(st.integers(0, 10_000))
def test_linf_norm_is_max_row_sum(seed):
    A = np.random.default_rng(seed).standard_normal((3, 2))
    r = op_norm(A, Lp(np.inf, 2), Lp(np.inf, 3))
    assert r.contains(np.abs(A).sum(1).max(), 1e-9)


@given(st.integers(0, 10_000))
def test_l2_norm_is_top_singular_value(seed):
    A = np.random.default_rng(seed).standard_normal((3, 4))
    r = op_norm(A, Lp(2, 4), Lp(2, 3))
    assert r.contains(np.linalg.norm(A, 2), 1e-8)


@pytest.mark.parametrize("p,q", [(1.5, 1.5), (1.0, 2.0), (3.0, np.inf)])
def test_norm_bounds_dominate_samples(p, q, rng):
    A = rng.standard_normal((3, 3))
    r = op_norm(A, Lp(p, 3), Lp(q, 3))
    X = rng.standard_normal((2000, 3))
    ratio = Lp(q, 3).norm(X @ A.T) / Lp(p, 3).norm(X)
    assert ratio.max() <= r.upper + 1e-9
    assert r.lower <= r.upper


def test_min_modulus_euclidean():
    T = LinearMap(np.diag([3.0, 0.5, 0.0]), Lp(2, 3), Lp(2, 3))
    assert min_modulus(T).contains(0.5, 1e-9)


def test_min_modulus_singular_values(rng):
    A = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 3))
    s = np.linalg.svd(A, compute_uv=False)
    T = LinearMap(A, Lp(2, 3), Lp(2, 4))
    assert min_modulus(T).contains(s[1], 1e-7)


def test_min_modulus_of_injective_l1_map():
    T = LinearMap(np.diag([2.0, 5.0]), Lp(1, 2), Lp(1, 2))
    assert min_modulus(T).contains(2.0, 1e-9)


def test_lower_modulus_of_scalar_is_exact():
    r = lower_modulus(0.3 * np.eye(3), Lp(1.5, 3), Lp(1.5, 3))
    assert r.lower == pytest.approx(0.3, abs=1e-15) and r.upper == pytest.approx(0.3, abs=1e-15)


def test_linear_map_shape_checked():
    with pytest.raises(ValueError):
        LinearMap(np.eye(2), Lp(1, 3), Lp(1, 2))


@pytest.mark.parametrize("seed", range(4))
def test_markus_small_perturbation(seed):
    rng = np.random.default_rng(seed)
    A, B = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
    T = A @ B.T
    S = (A + 0.01 * rng.standard_normal(A.shape)) @ (B + 0.01 * rng.standard_normal(B.shape)).T
    X = Lp([1.0, 2.0, np.inf, 1.5][seed], 3)
    rep = markus_check(LinearMap(S, X, X), LinearMap(T, X, X))
    assert rep.ok
    assert rep.checks["a"].status != "skip" and rep.checks["b"].status != "skip"


@pytest.mark.parametrize("A", [np.diag([1.0, 2.0, 4.0]), np.array([[1.0, 0.0], [0.0, 3.0], [1.0, 1.0]])])
def test_regular_type_images_stay_close(A):
    rep = regular_type_demo(A, 0.4 + 0.3j, n_lambda=10)
    assert rep.ok
    assert len(rep.openings) == 10
    assert rep.c_alpha > 0
