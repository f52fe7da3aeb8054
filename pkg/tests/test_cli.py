import csv
import io
import json
import subprocess
import sys
import time

import pytest

from banachgap.cli import REPRODUCTIONS, RECORD_KEYS, main

SPACES = {"X": {"type": "lp", "p": 1, "dim": 2}, "E": {"type": "lp", "p": 2, "dim": 2},
          "L4": {"type": "lp", "p": 1.5, "dim": 4}}
SUBS = {"Y1": {"space": "X", "basis": [[1, 0]]}, "Y2": {"space": "X", "basis": [[1, 0.5]]},
        "A": {"space": "L4", "basis": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]},
        "B": {"space": "L4", "basis": [[1, 0.1, 0, 0], [0, 1, 0.2, 0], [0, 0, 1, 0.1]]}}


def _write(tmp_path, tasks, spaces=SPACES, subs=SUBS):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"spaces": spaces, "subspaces": subs, "tasks": tasks}))
    return str(path)


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    recs = [json.loads(l) for l in out.getvalue().splitlines() if l.strip()]
    return code, recs, err.getvalue()


def test_compute_lines_example(tmp_path):
    cfg = _write(tmp_path, [{"quantity": "theta", "Y": "Y1", "Z": "Y2"}])
    code, recs, _ = _run("compute", "--config", cfg, "--quiet")
    assert code == 0 and len(recs) == 1
    r = recs[0]
    assert set(RECORD_KEYS) <= set(r)
    assert r["lower"] <= 0.5 <= r["upper"]
    assert r["method"] == "PolyhedralExact"


def test_compute_every_quantity(tmp_path):
    tasks = [{"quantity": q, "Y": "Y1", "Z": "Y2"}
             for q in ("theta", "theta0", "omega", "omega0", "lambda", "lambda0", "r", "r0", "dg",
                       "dop", "inclination")]
    tasks += [{"quantity": "bm", "spaces": ["X", "E"]},
              {"quantity": "gamma", "matrix": [[2, 0], [0, 0]], "domain": "E", "codomain": "E"},
              {"quantity": "h-index", "space": "X", "family": "PackingD", "params": {"m": 2}}]
    code, recs, _ = _run("compute", "--config", _write(tmp_path, tasks), "--quiet")
    assert code == 0 and len(recs) == len(tasks)
    for r in recs:
        assert r["lower"] is None or r["upper"] is None or r["lower"] <= r["upper"] + 1e-12
    by = {r["quantity"]: r for r in recs}
    assert by["gamma"]["lower"] <= 2 <= by["gamma"]["upper"]
    assert by["h-index"]["lower"] == 1.0


def test_bad_exponent_names_field(tmp_path):
    spaces = dict(SPACES, X={"type": "lp", "p": 0.5, "dim": 2})
    cfg = _write(tmp_path, [{"quantity": "theta", "Y": "Y1", "Z": "Y2"}], spaces=spaces)
    code, recs, err = _run("compute", "--config", cfg)
    assert code == 2 and not recs
    assert "spaces.X.p" in err


@pytest.mark.parametrize("task", [{"quantity": "nope", "Y": "Y1", "Z": "Y2"},
                                  {"quantity": "theta", "Y": "Y1", "Z": "missing"},
                                  {"quantity": "theta", "Y": "Y1", "Z": "A"}])
def test_invalid_tasks(tmp_path, task):
    code, recs, err = _run("compute", "--config", _write(tmp_path, [task]))
    assert code == 2 and err


def test_missing_config_file(tmp_path):
    code, _, err = _run("compute", "--config", str(tmp_path / "absent.json"))
    assert code == 2


def test_unknown_reproduction():
    code, _, err = _run("reproduce", "no-such-example")
    assert code == 2 and REPRODUCTIONS[0] in err


def test_bad_flags():
    assert _run("compute")[0] == 2
    assert _run("suite", "--mesh", "-1")[0] == 2
    assert _run("suite", "--only", "no.such.property")[0] == 2


def test_budget_exhaustion(tmp_path):
    cfg = _write(tmp_path, [{"quantity": "theta", "Y": "A", "Z": "B"}])
    code, _, err = _run("compute", "--config", cfg, "--budget", "50")
    assert code == 3 and "budget" in err


def test_csv_output(tmp_path):
    cfg = _write(tmp_path, [{"quantity": "theta", "Y": "Y1", "Z": "Y2"},
                            {"quantity": "omega", "Y": "Y1", "Z": "Y2"}])
    path = tmp_path / "out.csv"
    code, recs, _ = _run("compute", "--config", cfg, "--csv", str(path), "--quiet")
    rows = list(csv.DictReader(path.open()))
    assert code == 0 and len(rows) == 2
    assert rows[0]["quantity"] == "theta"
    assert float(rows[0]["upper"]) == pytest.approx(recs[0]["upper"])


def test_reruns_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, [{"quantity": "omega", "Y": "Y1", "Z": "Y2"},
                            {"quantity": "r", "Y": "Y1", "Z": "Y2"},
                            {"quantity": "bm", "spaces": ["X", "E"]}])
    a = io.StringIO()
    b = io.StringIO()
    main(["compute", "--config", cfg, "--quiet", "--seed", "7"], a, io.StringIO())
    main(["compute", "--config", cfg, "--quiet", "--seed", "7"], b, io.StringIO())
    assert a.getvalue() == b.getvalue()


def test_table_goes_to_stderr(tmp_path):
    cfg = _write(tmp_path, [{"quantity": "theta", "Y": "Y1", "Z": "Y2"}])
    code, recs, err = _run("compute", "--config", cfg)
    assert code == 0 and err.strip()
    _, _, quiet_err = _run("compute", "--config", cfg, "--quiet")
    assert quiet_err == ""


def test_reproduce_lines_example():
    code, recs, _ = _run("reproduce", REPRODUCTIONS[0], "--quiet")
    assert code == 0
    assert all(r["ok"] for r in recs)
    expected = sorted(r["expected"] for r in recs if r["relation"] == "contains")
    assert expected[:3] == pytest.approx(sorted([0.5, 1.0, 1 / 3]))


@pytest.mark.parametrize("name", [REPRODUCTIONS[i] for i in (1, 4, 6, 7, 8)],
                         ids=["duality-failure", "grid-identity", "regular-type", "hilbert",
                              "projection-estimate"])
def test_reproductions_pass(name):
    code, recs, _ = _run("reproduce", name, "--quiet")
    assert code == 0 and recs and all(r["ok"] for r in recs)


def test_reproduction_names_listed():
    assert len(REPRODUCTIONS) == len(set(REPRODUCTIONS)) == 11


def test_suite_subset():
    code, recs, _ = _run("suite", "--only", "constructions.identity", "--only",
                         "kernels.backends", "--quiet")
    assert code == 0
    assert [r["name"] for r in recs[:-1]] == ["constructions.identity", "kernels.backends"]
    assert recs[-1]["quantity"] == "summary" and recs[-1]["failed"] == 0


def test_four_dimensional_opening_is_fast(tmp_path):
    cfg = _write(tmp_path, [{"quantity": "theta", "Y": "A", "Z": "B"}])
    t = time.perf_counter()
    out = subprocess.run([sys.executable, "-m", "banachgap", "compute", "--config", cfg,
                          "--quiet"], capture_output=True, text=True)
    elapsed = time.perf_counter() - t
    assert out.returncode == 0
    rec = json.loads(out.stdout)
    assert rec["lower"] <= rec["upper"] and rec["method"] == "CertifiedNet"
    assert elapsed < 10.0
