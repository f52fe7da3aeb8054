import math

import numpy as np
import pytest

from banachgap import Lp, bm_upper, prop61_check, prop62_embed
from banachgap.suite import near_subspace, random_subspace


def test_l1_and_linf_plane_are_isometric():
    assert bm_upper(Lp(1, 2), Lp(np.inf, 2)) == pytest.approx(1.0, abs=1e-9)


def test_l2_and_l1_plane():
    v = bm_upper(Lp(2, 2), Lp(1, 2))
    assert math.sqrt(2) - 1e-9 <= v <= math.sqrt(2) + 1e-3


def test_same_space_is_one():
    assert bm_upper(Lp(1.5, 3), Lp(1.5, 3)) == pytest.approx(1.0, abs=1e-9)


def test_symmetric_and_at_least_one():
    a = bm_upper(Lp(1.5, 2), Lp(np.inf, 2))
    b = bm_upper(Lp(np.inf, 2), Lp(1.5, 2))
    assert a >= 1 and b >= 1
    assert a == pytest.approx(b, abs=2e-3)


def test_multiplicative_triangle():
    A, B, C = Lp(1, 2), Lp(1.5, 2), Lp(2, 2)
    assert bm_upper(A, C) <= bm_upper(A, B) * bm_upper(B, C) + 1e-3


@pytest.mark.parametrize("seed", range(4))
def test_estimate_from_operator_opening(seed):
    rng = np.random.default_rng(seed)
    X = Lp([1.0, 1.5, np.inf, 2.0][seed], 3)
    Y = random_subspace(X, 2, rng)
    Z = near_subspace(Y, 0.05, rng)
    rep = prop61_check(Y, Z)
    assert rep.check.status == "pass"
    assert rep.bm <= (1 + rep.u) / (1 - rep.u) + 1e-3


@pytest.mark.parametrize("pair", [(Lp(1, 2), Lp(2, 2)), (Lp(np.inf, 2), Lp(1.5, 2))])
def test_glue_embedding(pair, rng):
    Y, Z = pair
    U = np.eye(2) + 0.3 * rng.standard_normal((2, 2))
    W, Ys, Zs, g = prop62_embed(Y, Z, U, 0.05)
    assert g.isometry_error_y <= 1e-6 and g.isometry_error_z <= 1e-6
    assert g.omega_upper <= g.target + 0.05
    assert Ys.dim == Zs.dim == 2
