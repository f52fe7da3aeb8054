"""Acceptance criteria at their stated sizes and tolerances, one reported line each."""

import io
import math
import time

import numpy as np
import pytest

from banachgap import Config, example_310, example_314, lambda_gap, omega, theta
from banachgap.cli import main
from banachgap.suite import PROPERTIES, run_property

SEED = 1


@pytest.fixture(scope="module")
def full_suite():
    """Every registered property at full size, with wall-clock timings."""
    cfg = Config(seed=SEED)
    out, t_all = {}, time.perf_counter()
    for name in PROPERTIES:
        t = time.perf_counter()
        res = run_property(name, SEED, "full", cfg)
        out[name] = (res, time.perf_counter() - t)
    out["__total__"] = time.perf_counter() - t_all
    return out


def _clean(res) -> bool:
    return res.failed == 0 and res.passed > 0


def test_lines_in_l1_plane(criterion):
    t = time.perf_counter()
    _, Y1, Y2, Y3, exp = example_310(0.5, 1.0)
    pairs = ((Y1, Y2), (Y1, Y3), (Y2, Y3))
    exact = [theta(P, Q) for P, Q in pairs]
    net = [theta(P, Q, Config(force_net=True)) for P, Q in pairs]
    margin = exact[1].lower - (exact[0].upper + exact[2].upper)
    elapsed = time.perf_counter() - t
    ok = (np.allclose(exp, (0.5, 1.0, 1 / 3))
          and all(r.contains(e) and r.width <= 1e-9 for r, e in zip(exact, exp))
          and all(r.contains(e, 1e-12) and r.width <= 6e-3 for r, e in zip(net, exp))
          and margin >= 0.15 and elapsed < 1.0)
    assert criterion(1, "three lines in l1^2", ok,
                     f"exact widths <= {max(r.width for r in exact):.1e}, "
                     f"triangle margin {margin:.4f}, {elapsed:.2f} s")


def test_spherical_and_ball_duality_failure(criterion):
    t = time.perf_counter()
    ex = example_314(0.5)
    rows = []
    for f in (omega, lambda_gap):
        p, d = f(*ex.primal), f(*ex.dual)
        rows.append(p.contains(2 / 3, 1e-9) and d.contains(0.5, 1e-9) and p.lower > d.upper)
    elapsed = time.perf_counter() - t
    ok = all(rows) and elapsed < 2.0
    assert criterion(2, "spherical/ball openings under duality", ok,
                     f"primal 2/3 and dual 1/2 enclosed, disjoint, {elapsed:.2f} s")


def test_hilbert_oracle(criterion, full_suite):
    res, dt = full_suite["openings.hilbert"]
    width = res.notes["r0_width_max"]
    ok = _clean(res) and width <= 5e-3 and dt < 120
    assert criterion(3, "Hilbert-space oracle, 200 pairs", ok,
                     f"{res.passed} checks, {res.failed} failures, r0 width <= {width:.1e}, "
                     f"{dt:.1f} s")


def test_metric_axioms(criterion, full_suite):
    res, dt = full_suite["openings.metric_axioms"]
    ok = _clean(res) and PROPERTIES["openings.metric_axioms"][2] == 2000
    assert criterion(4, "metric axioms, 500 triples per family", ok,
                     f"{res.passed} checks, {res.failed} failures, {dt:.1f} s")


def test_annihilator_duality(criterion, full_suite):
    res, dt = full_suite["openings.duality"]
    ok = _clean(res) and PROPERTIES["openings.duality"][2] == 200
    assert criterion(5, "one-sided opening duality, 200 pairs", ok,
                     f"{res.passed} checks, {res.failed} failures, {dt:.1f} s")


def test_larger_subspace_far_point(criterion, full_suite):
    res, dt = full_suite["openings.borsuk"]
    ok = _clean(res) and PROPERTIES["openings.borsuk"][2] == 50
    assert criterion(6, "dim Y = dim Z + 1 gives opening near 1, 50 pairs", ok,
                     f"{res.passed} checks, {res.failed} failures, worst margin "
                     f"{res.worst:+.1e}")


def test_douady_pair(criterion, full_suite):
    res, dt = full_suite["constructions.douady"]
    ok = _clean(res) and res.passed == 12
    assert criterion(7, "close subspaces with structural difference", ok,
                     f"{res.passed} checks on l1^3 and l2^3, worst margin {res.worst:+.1e}")


def test_kadets_gluing(criterion, full_suite):
    res, dt = full_suite["constructions.kadets"]
    kb = {k: v for k, v in res.notes.items() if k.startswith("kbound")}
    ok = _clean(res) and len(kb) == 9
    worst = max(v - 2 * (2 / float(k.split("_")[1][1:]) - 1) for k, v in kb.items())
    assert criterion(8, "gluing along power maps, p in {1.2,1.5,1.9}, n in {2,4,6}", ok,
                     f"{res.passed} checks, kbound minus bound <= {worst:+.3f}, {dt:.1f} s")


def test_grid_identity(criterion, full_suite):
    res, _ = full_suite["constructions.identity"]
    ok = _clean(res) and res.passed == 101
    assert criterion(9, "sup-norm identity on 100 grid points", ok,
                     f"{res.passed} checks at 1e-12, special value reproduced")


def test_perturbation_of_kernels_and_images(criterion, full_suite):
    res, dt = full_suite["operators.markus"]
    rate = res.notes["gamma_skip_rate"]
    ok = _clean(res) and rate < 0.1
    assert criterion(10, "kernel and image perturbation, 100 pairs per family", ok,
                     f"{res.passed} checks, skip rate {rate:.1%}, {dt:.1f} s")


def test_regular_type_points(criterion, full_suite):
    res, dt = full_suite["operators.regular_type"]
    ok = _clean(res) and res.skipped == 0 and res.passed == 20 * 11
    assert criterion(11, "images near a point of regular type, 20 operators", ok,
                     f"{res.passed} checks, {res.skipped} skipped")


def test_banach_mazur_estimates(criterion, full_suite):
    res, dt = full_suite["banach_mazur.estimates"]
    ok = res.failed == 0 and res.passed >= 20
    assert criterion(12, "distance estimate and gluing embedding", ok,
                     f"{res.passed} checks, {res.skipped} skipped (r0 >= 1 or singular U), "
                     f"{dt:.1f} s")


def test_index_machinery(criterion, full_suite):
    basic, _ = full_suite["indices.basic"]
    sub, dt = full_suite["indices.subspace_bounds"]
    ok = _clean(basic) and _clean(sub) and sub.passed == 100
    assert criterion(13, "index values, witnesses, subspace inequalities, monotonicity", ok,
                     f"{basic.passed} + {sub.passed} checks, {basic.failed + sub.failed} failures")


def test_determinism_and_budget(criterion, full_suite):
    runs = []
    for _ in range(2):
        out = io.StringIO()
        code = main(["suite", "--seed", str(SEED), "--quiet"], out, io.StringIO())
        runs.append((code, out.getvalue()))
    same = runs[0][1] == runs[1][1] and runs[0][0] == 0
    total = full_suite["__total__"]
    failing = [n for n in PROPERTIES if not full_suite[n][0].ok]
    ok = same and total < 15 * 60 and not failing
    assert criterion(14, "byte-identical reruns and full-suite runtime", ok,
                     f"identical={same}, full suite {total:.0f} s, failing {failing or 'none'}")
