import json
import subprocess
import sys

import pytest

from hitchin_lab.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_pair(capsys):
    code, out, _ = call(capsys, "analyze", "--rho", "ex1")
    rep = json.loads(out)
    assert code == 0
    assert rep["epsilon"] == -1 and rep["normalized"] and rep["label"] == "SU(3)"


def test_analyze_single_form(capsys):
    code, out, _ = call(capsys, "analyze", "--rho", "e123 + f123")
    assert code == 0 and json.loads(out)["epsilon"] == 1


def test_analyze_seven(capsys):
    code, out, _ = call(capsys, "analyze", "--dim", "7", "--rho", "e127 + e347 + e567 + e135 - e146 - e236 - e245")
    assert code == 0 and json.loads(out)["dimension"] == 7


def test_classify(capsys):
    code, out, _ = call(capsys, "classify", "--omega", "e2f2 + e13 + f13")
    assert code == 0 and json.loads(out)["type"] == 2


def test_halfflat(capsys):
    code, out, _ = call(capsys, "halfflat-check", "--rho", "ex3")
    rep = json.loads(out)
    assert code == 0 and rep["halfFlat"] and rep["label"] == "SL(3,R)"


def test_kappa(capsys):
    code, out, _ = call(capsys, "kappa", "--rho", "ex1")
    rep = json.loads(out)
    assert code == 0
    assert rep["kappa"] == "x^4 - 2*sqrt2*x^3 + 4*sqrt2*x - 4"
    assert rep["interval"] == ["-sqrt2", "sqrt2"]


def test_flow_lines(capsys):
    code, out, _ = call(capsys, "flow", "--rho", "ex1", "--steps", "4", "--h", "0.01", "--record-every", "2")
    lines = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(lines) == 3
    assert "x" in lines[0] and float(lines[-1]["t"]) == pytest.approx(0.04)


def test_signature(capsys):
    code, out, _ = call(capsys, "signature", "--group", "su51")
    rep = json.loads(out)
    assert code == 0
    assert rep["orbits"][0]["tangentSignature"] == [7, 3]
    assert [s["tauSquare"] for s in rep["spaces"]] == [1, 1, -1]


def test_curvature_rigid_example(capsys):
    code, out, _ = call(capsys, "curvature", "--omega", "e13 + e25 + e46",
                        "--rho", "e126 + sqrt2*e135 + e156 + e234 - e345 + sqrt2*e456")
    rep = json.loads(out)
    assert code == 0 and rep["dimension"] == 6
    assert rep["verdict"] == "SymmetricRank1" and rep["rigidity"]["ok"]


def test_json_file_input(capsys, tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps({"omega": "e1f1 + e2f2 + e3f3", "rho": "e123 + f123"}))
    code, out, _ = call(capsys, "analyze", "--rho", "e123 + f123", "--omega", str(path))
    assert code == 0 and json.loads(out)["epsilon"] == 1
    code, out, _ = call(capsys, "analyze", "--rho", str(path))
    assert code == 0 and json.loads(out)["signature"]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = call(capsys, "classify", "--omega", "e1f1 + e2f2 + e3f3", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["type"] == 1


def test_rejected_input_exits_two(capsys):
    code, out, _ = call(capsys, "analyze", "--rho", "e123")
    rec = json.loads(out)
    assert code == 2 and rec["error"] == "NotStable" and rec["command"] == "analyze"


def test_missing_file_exits_one(capsys, tmp_path):
    code, out, err = call(capsys, "analyze", "--rho", str(tmp_path / "absent.json"))
    assert code == 1 and out == "" and "absent.json" in err


def test_missing_flag_exits_one(capsys):
    code, _, err = call(capsys, "classify")
    assert code == 1 and "--omega" in err


def test_output_is_deterministic(capsys):
    first = call(capsys, "kappa", "--rho", "ex2")[1]
    second = call(capsys, "kappa", "--rho", "ex2")[1]
    assert first == second and first.encode() == second.encode()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hitchin_lab.cli", "classify", "--omega", "e2f2 + e13 + f13"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0 and json.loads(res.stdout)["type"] == 2
