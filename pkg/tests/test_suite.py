import math

import numpy as np
import pytest

from banachgap import Config, Lp
from banachgap.suite import (FAMILIES, PROPERTIES, PropertyResult, _num, family_space,
                             near_subspace, random_subspace, rng_for, run_property, run_suite)

CHEAP = ["distance.lipschitz", "distance.duality", "openings.equal_dims", "openings.hilbert",
         "openings.duality", "constructions.identity", "operators.min_modulus",
         "operators.regular_type", "kernels.backends"]


def test_property_result_accounting():
    r = PropertyResult("x")
    r.check(1.0, 2.0)
    r.check(3.0, 2.0, 0.5)
    r.skip()
    assert (r.passed, r.failed, r.skipped) == (1, 1, 1)
    assert not r.ok
    assert r.worst == pytest.approx(1.0)


def test_number_rounding():
    assert _num(None) is None
    assert _num(math.inf) is None and _num(math.nan) is None
    assert _num(1 / 3) == float(f"{1 / 3:.12g}")


def test_named_rng_is_stable():
    a = rng_for(1, "name").random(3)
    b = rng_for(1, "name").random(3)
    c = rng_for(1, "other").random(3)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("fam", FAMILIES)
def test_family_spaces(fam, rng):
    X = family_space(fam, 3, rng)
    assert X.dim == 3
    Y = random_subspace(X, 2, rng)
    Z = near_subspace(Y, 0.05, rng)
    assert Y.dim == Z.dim == 2


@pytest.mark.parametrize("name", CHEAP)
def test_cheap_properties_pass(name):
    res = run_property(name, 1, "smoke", Config(seed=1))
    assert res.failed == 0 and res.passed > 0


def test_suite_is_deterministic():
    a = [r.as_dict() for r in run_suite(3, "smoke", names=CHEAP[:4])]
    b = [r.as_dict() for r in run_suite(3, "smoke", names=CHEAP[:4])]
    assert a == b


def test_registry_covers_every_module():
    prefixes = {n.split(".")[0] for n in PROPERTIES}
    assert {"distance", "subspaces", "openings", "operator_opening", "banach_mazur",
            "constructions", "indices", "operators", "kernels"} <= prefixes


def test_unknown_size_rejected():
    with pytest.raises(ValueError):
        list(run_suite(1, "huge"))
