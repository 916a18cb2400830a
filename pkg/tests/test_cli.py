import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from qabkit.cli import main, run

DATA = Path(__file__).resolve().parents[1] / "data"


def _run(argv):
    status, report, err = run(argv)
    if report is not None:
        report.pop("_render")
    return status, report, err


def test_pushout_report():
    status, rep, _ = _run(["op", "pushout", "--f", str(DATA / "times2.json"), "--g", str(DATA / "times3.json")])
    assert status == 0
    assert rep["result"]["object"]["normal_form"] == "Z"
    assert rep["result"]["commutes"] and rep["result"]["psi_is_epi"]
    assert rep["format"].startswith("qabkit-report/")


def test_ill_defined_input_exits_1(capsys):
    assert main(["op", "kernel", "--mor", str(DATA / "ill_defined.json")]) == 1
    assert "IllDefined" in capsys.readouterr().err


def test_classify_quotient_map():
    status, rep, _ = _run(["classify", "--context", "div", "--mor", str(DATA / "f_QtoQmodZ.json")])
    assert status == 0
    flags = rep["result"]["flags"]
    assert flags["is_mono"] and flags["is_epi"] and not flags["is_strict_mono"]
    assert flags["is_universal_mono"] and not flags["is_universal_epi"]


def test_prop32_verb():
    status, rep, _ = _run(["prop32"])
    assert status == 0 and rep["result"]["mismatches"] == {}
    assert rep["result"]["ambient_pullback"] == "Z[1/3]"


def test_axiom_check_zero_trials():
    status, rep, _ = _run(["axiom-check", "--context", "fin-tors", "--trials", "0"])
    assert status == 0 and rep["counts"]["violations"] == 0


def test_axiom_check_div():
    status, rep, _ = _run(["axiom-check", "--context", "div", "--trials", "20", "--seed", "7"])
    assert status == 0
    assert rep["counts"]["not_representable"] >= 0
    assert rep["result"]["completed"] == {"1": 20, "1*": 20}


def test_reports_are_deterministic():
    argv = ["axiom-check", "--context", "lat", "--trials", "15", "--seed", "4"]
    a, b = _run(argv)[1], _run(argv)[1]
    a.pop("timing"), b.pop("timing")
    assert a == b


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("QABKIT_SEED", "42")
    assert _run(["prop32"])[1]["seed"] == 42
    assert _run(["prop32", "--seed", "3"])[1]["seed"] == 3
    monkeypatch.setenv("QABKIT_SEED", "x")
    assert _run(["prop32"])[0] == 1


def test_usage_errors_exit_1():
    assert _run(["bogus"])[0] == 1
    assert _run([])[0] == 1
    assert _run(["axiom-check", "--context", "ab"])[0] == 1
    assert _run(["norm-demo", "--family", "nope"])[0] == 1


def test_norm_demo_text_output(capsys):
    assert main(["norm-demo", "--max-n", "5", "--format", "text"]) == 0
    assert "collapsing" in capsys.readouterr().out


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["prop32", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == 0


def test_obj_verb():
    status, rep, _ = _run(["obj", "--relations", "[[2, 0], [0, 3]]"])
    assert status == 0 and rep["result"]["object"]["factors"] == [6]
    status, rep, _ = _run(["obj", "--text", "Q + Z/4"])
    assert status == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qabkit.cli", "prop32"], capture_output=True, text=True, env=os.environ | {"QABKIT_SEED": "1"}
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["seed"] == 1
