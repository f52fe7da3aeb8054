import os
import subprocess
import sys

import numpy as np
import pytest

from banachgap import kernels
from banachgap import _kernels_py as pure


def _brute(a, b, p):
    D = np.linalg.norm(a[:, None, :] - b[None, :, :], ord=p, axis=2)
    return D.min(1), D.argmin(1)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, np.inf])
@pytest.mark.parametrize("impl", [kernels, pure], ids=["selected", "python"])
def test_row_min_matches_bruteforce(p, impl, rng):
    a, b = rng.standard_normal((40, 3)), rng.standard_normal((25, 3))
    if p == np.inf:
        d, i = impl.row_min_cheb(np.ascontiguousarray(a), np.ascontiguousarray(b))
    else:
        d, i = impl.row_min_lp(np.ascontiguousarray(a), np.ascontiguousarray(b), p)
    dd, ii = _brute(a, b, p)
    np.testing.assert_allclose(d, dd, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(np.linalg.norm(a - b[i], ord=p, axis=1), dd, rtol=1e-12)


@pytest.mark.parametrize("impl", [kernels, pure], ids=["selected", "python"])
def test_sup_min_cheb(impl, rng):
    a, b = rng.standard_normal((30, 4)), rng.standard_normal((50, 4))
    dd, _ = _brute(a, b, np.inf)
    assert float(impl.sup_min_cheb(a, b)) == pytest.approx(dd.max(), rel=1e-12)


def test_backends_agree(rng):
    a, b = rng.standard_normal((200, 3)), rng.standard_normal((300, 3))
    for p in (1.0, 2.0, 1.5):
        np.testing.assert_allclose(kernels.row_min_lp(a, b, p)[0], pure.row_min_lp(a, b, p)[0],
                                   rtol=1e-12)
    np.testing.assert_allclose(kernels.row_min_cheb(a, b)[0], pure.row_min_cheb(a, b)[0])


def test_compiled_backend_is_built():
    assert kernels.BACKEND == "compiled"


def test_pure_backend_selected_by_environment():
    env = dict(os.environ, BANACHGAP_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import banachgap; print(banachgap.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
