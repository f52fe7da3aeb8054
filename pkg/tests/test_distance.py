import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from banachgap import DirectSum, Lp, dist_bounds, dist_lp


def _oracle(space, x, B):
    """Direct minimisation of ``c -> ||x - B c||`` from several starts."""
    f = lambda c: float(space.norm((x - B @ c)[None])[0])
    c0 = np.linalg.lstsq(B, x, rcond=None)[0]
    best = np.inf
    for start in (c0, np.zeros(B.shape[1]), 0.5 * c0):
        r = minimize(f, start, method="Powell", options={"xtol": 1e-12, "ftol": 1e-14,
                                                         "maxiter": 20000})
        best = min(best, r.fun)
    return best


SPACES = [Lp(1, 4), Lp(1.5, 4), Lp(2, 4), Lp(3, 4), Lp(np.inf, 4),
          DirectSum([Lp(np.inf, 2), Lp(1, 2)], 1)]


@pytest.mark.parametrize("space", SPACES, ids=repr)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_bounds_bracket_oracle(space, k, rng):
    B = rng.standard_normal((4, k))
    X = rng.standard_normal((6, 4))
    lo, hi, _ = dist_bounds(space, X, B)
    for i, x in enumerate(X):
        d = _oracle(space, x, B)
        assert lo[i] <= d + 1e-7
        assert hi[i] >= lo[i] - 1e-15
        assert hi[i] <= d + 1e-6


@pytest.mark.parametrize("p", [1.0, np.inf])
def test_lp_route_matches_bounds(p, rng):
    space = Lp(p, 4)
    B = rng.standard_normal((4, 2))
    for x in rng.standard_normal((5, 4)):
        d, c = dist_lp(space, x, B)
        lo, hi, _ = dist_bounds(space, x[None], B)
        assert lo[0] - 1e-9 <= d <= hi[0] + 1e-9
        assert space.norm((x - B @ c)[None])[0] == pytest.approx(d, abs=1e-9)


def test_euclidean_closed_form(rng):
    B = rng.standard_normal((5, 2))
    X = rng.standard_normal((10, 5))
    Q, _ = np.linalg.qr(B)
    expect = np.linalg.norm(X - (X @ Q) @ Q.T, axis=1)
    lo, hi, _ = dist_bounds(Lp(2, 5), X, B)
    np.testing.assert_allclose(lo, expect, atol=1e-9)
    np.testing.assert_allclose(hi, expect, atol=1e-9)


def test_point_in_subspace_has_zero_distance(rng):
    B = rng.standard_normal((4, 2))
    X = (B @ rng.standard_normal((2, 5))).T
    _, hi, _ = dist_bounds(Lp(1.5, 4), X, B)
    assert np.all(hi < 1e-8)


@given(st.integers(0, 10_000), st.sampled_from([1.0, 1.5, 2.0, np.inf]))
def test_distance_is_one_lipschitz(seed, p):
    rng = np.random.default_rng(seed)
    space = Lp(p, 3)
    B = rng.standard_normal((3, 1))
    x, y = rng.standard_normal((2, 3))
    lo, hi, _ = dist_bounds(space, np.vstack([x, y]), B)
    gap = space.norm((x - y)[None])[0]
    assert hi[0] - lo[1] <= gap + 1e-7
    assert hi[1] - lo[0] <= gap + 1e-7


@given(st.integers(0, 10_000), st.floats(-3, 3))
def test_distance_is_homogeneous(seed, t):
    rng = np.random.default_rng(seed)
    space = Lp(1.5, 3)
    B = rng.standard_normal((3, 2))
    x = rng.standard_normal(3)
    lo, hi, _ = dist_bounds(space, np.vstack([x, t * x]), B)
    assert lo[1] <= abs(t) * hi[0] + 1e-7
    assert hi[1] >= abs(t) * lo[0] - 1e-7
