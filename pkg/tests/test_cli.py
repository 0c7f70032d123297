import csv
import io
import json
import math
import subprocess
import sys

import pytest

from bianchi_maxwell.cli import main

from conftest import CONFIG_DIR, case_config


def run(tmp_path, command, cfg, *extra, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg) if isinstance(cfg, dict) else cfg)
    out = tmp_path / "out.json"
    code = main([command, "--config", str(path), "--out", str(out), *extra])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def test_verify_group_vii(tmp_path):
    code, rep = run(tmp_path, "verify-group", {"group": "VII", "alpha": 1.0, "points": 100, "seed": 42})
    assert code == 0 and rep["status"] == "PASS"
    assert rep["checks"]["commutator"]["max_residual"] < 1e-7
    assert rep["scenario"]["seed"] == 42 and rep["scenario"]["h_frame"] == 1e-5


def test_verify_group_i_exact_zero(tmp_path):
    code, rep = run(tmp_path, "verify-group", {"group": "I"})
    assert code == 0
    assert all(c["max_residual"] == 0.0 for c in rep["checks"].values())


def test_verify_group_degenerate_alpha(tmp_path, capsys):
    code, rep = run(tmp_path, "verify-group", {"group": "VII", "alpha": 0})
    assert code == 2
    assert rep["error"]["field"] == "alpha"
    assert "alpha" in capsys.readouterr().err


def test_malformed_json_reports_line(tmp_path, capsys):
    code, _ = run(tmp_path, "verify-group", '{"group": "I",\n "points": }')
    assert code == 2
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize("cfg", [{"group": "I", "points": 0}, {"group": "I", "colour": 1}, {"points": 3},
                                 {"group": "I", "thresholds": {"bogus": 1}}])
def test_bad_scenarios(tmp_path, cfg):
    assert run(tmp_path, "verify-group", cfg)[0] == 2


def test_integrate_group_i(tmp_path):
    cfg = {"group": "I", "interval": [0, 1], "initial": {"alpha": [0.5, 0, 0], "beta": [1, 2, 3]}}
    code, rep = run(tmp_path, "integrate", cfg, "--csv", str(tmp_path / "t.csv"))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO((tmp_path / "t.csv").read_text())))
    assert len(rows) == 11
    for r in rows:
        t = float(r["u0"])
        assert float(r["alpha_1"]) == pytest.approx(0.5 + t, abs=1e-9)
        assert float(r["alpha_3"]) == pytest.approx(3 * t, abs=1e-9)


def test_integrate_group_ii_oscillator(tmp_path):
    cfg = {"group": "II", "initial": {"alpha": [1, 0, 0], "beta": [0, 0, 0]}}
    code, rep = run(tmp_path, "integrate", cfg)
    assert code == 0
    assert rep["final"]["alpha"][0] == pytest.approx(math.cos(1.0), abs=1e-7)


def test_integrate_off_shell(tmp_path):
    cfg = {"group": "V", "initial": {"alpha": [0, 0, 0], "beta": [0, 0, 1]}}
    code, rep = run(tmp_path, "integrate", cfg)
    assert code == 2 and rep["error"]["type"] == "ConstraintViolation"


def test_integrate_with_oracle_and_determinism(tmp_path):
    cfg = json.loads((CONFIG_DIR / "integrate_vii.json").read_text())
    cfg["oracle_points"] = 4
    code, rep = run(tmp_path, "integrate", cfg, "--csv", str(tmp_path / "a.csv"))
    first = (tmp_path / "out.json").read_bytes()
    assert code == 0 and rep["checks"]["oracle"]["max_residual"] < 1e-5
    code2, _ = run(tmp_path, "integrate", cfg, "--csv", str(tmp_path / "b.csv"))
    assert (tmp_path / "out.json").read_bytes() == first
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_bad_expression_is_config_error(tmp_path):
    cfg = {"group": "I", "eta": {"11": "1 + * t"}}
    assert run(tmp_path, "integrate", cfg)[0] == 2


def test_check_solution_g1(tmp_path):
    cfg = {"case": "G1_16b", "constants": {"beta1": 1, "beta2": 2, "beta3": 3},
           "functions": {"eta11": "1", "eta12": "0", "eta13": "0", "eta22": "1", "eta23": "0", "eta33": "1"}}
    code, rep = run(tmp_path, "check-solution", cfg)
    assert code == 0
    assert all(c["max_residual"] < 1e-12 for c in rep["checks"].values())


def test_check_solution_vii_422_with_oracle(tmp_path):
    code, rep = run(tmp_path, "check-solution", case_config("VII_4_2_2"), "--points", "3")
    assert code == 0 and rep["checks"]["oracle"]["max_residual"] < 1e-5
    assert rep["scenario"]["oracle_points"] == 3


def test_check_solution_corrupted(tmp_path):
    cfg = case_config("VII_4_2_2")
    cfg["perturb"] = {"eta11": 1.1}
    code, rep = run(tmp_path, "check-solution", cfg)
    assert code == 1 and rep["status"] == "FAIL"
    assert "E_beta1" in rep["failed_equations"]


def test_check_solution_domain_error(tmp_path, capsys):
    cfg = case_config("VII_4_2_1")
    cfg["functions"]["beta2"] = "0.5 - t"
    cfg["samples"] = 1
    code, rep = run(tmp_path, "check-solution", cfg)
    assert code == 3
    assert rep["error"]["u0"] == 0.5 and rep["error"]["quantity"] == "beta2"
    assert "u0=0.5" in capsys.readouterr().err


def test_adjudicate(tmp_path):
    code, rep = run(tmp_path, "adjudicate", case_config("VII_4_1_1b"))
    assert code == 0 and rep["passing"] == ["derived"]
    assert len(rep["variants"]) == 9


def test_adjudicate_custom_variants(tmp_path):
    cfg = case_config("VII_4_2_2")
    cfg["variants"] = [{"name": "flipped", "variant": {"eta11": "printed"}}]
    code, rep = run(tmp_path, "adjudicate", cfg)
    assert code == 1 and rep["passing"] == []
    cfg["variants"] = [{"name": "bad", "variant": {"eta11": "sideways"}}]
    assert run(tmp_path, "adjudicate", cfg)[0] == 2


def test_console_script_stdout(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"group": "IV", "points": 5}))
    proc = subprocess.run([sys.executable, "-m", "bianchi_maxwell.cli", "verify-group", "--config", str(path),
                           "--seed", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    rep = json.loads(proc.stdout)
    assert rep["scenario"]["seed"] == 3 and list(rep) == sorted(rep)
