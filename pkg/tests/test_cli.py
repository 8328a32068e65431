import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from wandering.cli import run
from wandering.instances import random_lifting, swap_interaction
from wandering.io import matrix_to_dict, vector_to_dict

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.fixture
def half(tmp_path):
    return write(tmp_path, "half.json", {"kind": "dilation", "payload": {"T": matrix_to_dict([[0.5]])}})


def report(capsys):
    return json.loads(capsys.readouterr().out)


def test_verify_scalar_half(half, capsys):
    assert run(["verify", half, "--no-meta"]) == 0
    r = report(capsys)
    assert r["pass"] and not r["failed"]
    names = {c["name"] for c in r["checks"]}
    assert {"c1", "c6", "toeplitz_structure", "realization", "theta_contractive"} <= names
    assert all(c["pass"] is not False for c in r["checks"])


def test_reports_are_byte_identical(half, capsys):
    run(["verify", half, "--no-meta"])
    first = capsys.readouterr().out
    run(["verify", half, "--no-meta"])
    assert capsys.readouterr().out == first
    run(["verify", half])
    assert "meta" in json.loads(capsys.readouterr().out)


def test_eval_csv(half, tmp_path):
    out = tmp_path / "theta.csv"
    assert run(["eval", half, "--samples", "64", "--radius", "0.99", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["theta_index", "z_re", "z_im", "sv_1"]
    assert len(rows) == 65
    assert max(float(r[3]) for r in rows[1:]) <= 1 + 1e-8


def test_malformed_matrix_message(tmp_path, capsys):
    p = write(tmp_path, "bad.json", {"kind": "dilation",
                                     "payload": {"T": {"rows": 2, "cols": 2, "re": [1, 2, 3], "im": [0, 0, 0]}}})
    assert run(["verify", p]) == 2
    err = capsys.readouterr().err
    assert "ParseError" in err and "payload.T.re" in err


def test_series_and_kernel(half, capsys):
    assert run(["series", half, "--degree", "3", "--no-meta"]) == 0
    s = report(capsys)["series"]
    assert [e["word"] for e in s["entries"]] == ["0", "1", "11", "111"]
    assert s["entries"][2]["matrix"]["re"][0] == pytest.approx(0.75 * 0.5)
    assert run(["kernel", half, "--degree", "2", "--no-meta"]) == 0
    k = report(capsys)["kernel"]
    assert k["maxlen"] == 2 and len(k["entries"]) == 9


def test_failing_check_sets_exit_code(tmp_path, capsys):
    # a noncoisometric raw system fails to dilate: build error, exit 2
    p = write(tmp_path, "raw.json", {"kind": "raw", "payload": {
        "A": [matrix_to_dict([[0.5]])], "B": [matrix_to_dict([[0.5]])],
        "C": matrix_to_dict([[0.5]]), "D": matrix_to_dict([[0.5]])}})
    assert run(["verify", p]) == 2
    assert "NotCoisometry" in capsys.readouterr().err


def test_check_failure_exit_one(tmp_path, capsys):
    # tolerance tighter than rounding makes some check fail honestly
    p = write(tmp_path, "t.json", {"kind": "dilation", "tol": 1e-300,
                                   "payload": {"T": matrix_to_dict(np.array([[0.3, 0.1], [0.2, 0.4]]))}})
    assert run(["verify", p, "--no-meta"]) == 1
    r = report(capsys)
    assert not r["pass"] and r["failed"]
    failures = [c for c in r["checks"] if c["pass"] is False]
    assert failures and all(c["witness"] is not None for c in failures)


def test_kind_pipelines(tmp_path, capsys):
    L, _ = random_lifting(1, 2, 1, seed=5)
    lp = write(tmp_path, "l.json", {"kind": "lifting", "depth": 3, "payload": {
        "S": [matrix_to_dict(L.S[0])], "Q": [matrix_to_dict(L.Q[0])], "R": [matrix_to_dict(L.R[0])]}})
    assert run(["lifting", lp, "--no-meta"]) == 0
    names = [c["name"] for c in report(capsys)["checks"]]
    assert "restriction_R" in names and "gamma_extraction" in names
    I = swap_interaction()
    mp = write(tmp_path, "m.json", {"kind": "markov", "payload": {
        "dimH": 2, "dimK": 2, "dimP": 2, "U": matrix_to_dict(I.U),
        **{k: vector_to_dict(getattr(I, k)) for k in ("omegaH", "omegaK", "omegaP")}}})
    assert run(["markov", mp, "--no-meta"]) == 0
    r = report(capsys)
    assert {"prop_hypothesis", "prop_containment", "prop_wandering"} <= {c["name"] for c in r["checks"]}
    skipped = [c for c in r["checks"] if c["pass"] is None]
    assert all("reason" in c for c in skipped)
    assert run(["lifting", mp]) == 2
    assert run(["eval", mp]) == 2


def test_characteristic_d2(tmp_path, capsys):
    T = [matrix_to_dict(0.4 * np.eye(2)), matrix_to_dict(np.array([[0, 0.5], [0.3, 0]]))]
    p = write(tmp_path, "c.json", {"kind": "dilation", "depth": 3, "payload": {"T": T}})
    assert run(["characteristic", p, "--no-meta"]) == 0
    r = report(capsys)
    assert r["series"]["d"] == 2 and r["series"]["coefficients"] == 15


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_scenarios(path, capsys):
    assert run(["verify", str(path), "--no-meta"]) == 0


def test_module_entry_point(half):
    res = subprocess.run([sys.executable, "-m", "wandering", "verify", half, "--no-meta"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["pass"]
