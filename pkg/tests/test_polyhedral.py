import numpy as np
import pytest

from banachgap import Lp
from banachgap.polyhedral import (dedupe_symmetric, extreme_points, polar_vertices,
                                  polytope_vertices_bruteforce, sign_vectors)


def _same_rows(A, B, tol=1e-8):
    A, B = np.atleast_2d(A), np.atleast_2d(B)
    if A.shape != B.shape:
        return False
    return all(np.min(np.abs(B - a).max(1)) < tol for a in A)


def _sym(V):
    return np.vstack([V, -V])


def test_sign_vectors():
    S = sign_vectors(3)
    assert S.shape[1] == 3
    assert set(map(tuple, np.abs(S).astype(int))) == {(1, 1, 1)}


def test_l1_ball_vertices():
    V = Lp(1, 3).ball_vertices
    assert _same_rows(_sym(dedupe_symmetric(V)), _sym(np.eye(3)))


def test_linf_ball_vertices_are_sign_vectors():
    V = Lp(np.inf, 3).ball_vertices
    assert len(_sym(dedupe_symmetric(V))) == 8
    np.testing.assert_allclose(np.abs(V), 1.0)


@pytest.mark.parametrize("seed", range(5))
def test_polar_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((5, 3))
    fast = _sym(dedupe_symmetric(polar_vertices(A)))
    slow = _sym(dedupe_symmetric(polytope_vertices_bruteforce(A)))
    assert _same_rows(fast, slow, 1e-7)


def test_extreme_points_drops_interior():
    A = np.vstack([np.eye(2), [[0.2, 0.3]]])
    E = _sym(dedupe_symmetric(extreme_points(A)))
    assert _same_rows(E, _sym(np.eye(2)))
