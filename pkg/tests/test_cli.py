"""Command-line interface: outputs, determinism and error reporting."""

import csv
import json
import re
import subprocess
import sys

import pytest

from quasisquare.cli import EXIT_CODES, main

ERROR_LINE = re.compile(r"^error: [A-Z_]+: .+$")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def csv_body(out):
    lines = out.splitlines()
    assert lines[0].startswith("# config: ")  # every table carries its RunConfig
    return [ln for ln in lines if not ln.startswith("#")]


def assert_error(code, err, name):
    assert code == EXIT_CODES[name] != 0
    lines = err.strip().splitlines()
    assert len(lines) == 1 and ERROR_LINE.match(lines[0]) and f": {name}: " in lines[0]


# ---------------------------------------------------------------- qsq

def test_qsq_one_plus_z(capsys):
    body = run_json(capsys, "qsq", "[1, 1]", "--theta", '{"monomial": 2}', "--p", "4")
    rep = body["report"]
    assert rep["passed"]
    assert rep["output"]["coeffs"] == [[2, 0], [2, 0]]
    assert body["config"]["grid"] == 4096


def test_qsq_coefficients(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "qsq", "[[1.5, -2]]", "--p", "3", "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())["report"]
    assert rep["passed"]
    assert rep["output"]["coeffs"] == [[6.25, 0]]  # |c|^2


def test_qsq_refuses_p2(capsys):
    code, _, err = run(capsys, "qsq", "[1, 1]", "--p", "2")
    assert_error(code, err, "BAD_EXPONENT")
    assert "endpoint-sweep" in err


@pytest.mark.parametrize("argv,name", [
    (("qsq", "{not json", "--p", "4"), "BAD_INPUT"),
    (("qsq", "[1, 1]", "--p", "1.5"), "BAD_EXPONENT"),
    (("qsq", "[1, 1]"), "USAGE"),
    (("qsq", "[1, 1]", "--p", "4", "--grid", "2"), "GRID_TOO_SMALL"),
    (("qsq", "[1, 1]", "--p", "4", "--grid", "100"), "USAGE"),
    (("qsq", "[1, 1]", "--p", "4", "--theta", '{"zeros": [[2, 0]]}'), "BAD_INPUT"),
    (("nonsense",), "USAGE"),
    ((), "USAGE"),
])
def test_error_lines(capsys, argv, name):
    code, _, err = run(capsys, *argv)
    assert_error(code, err, name)


# ---------------------------------------------------------------- constants / embed / tables

def test_constants(capsys):
    rows = run_json(capsys, "constants", "--p", "4")["rows"]
    assert rows[0]["A_p/2"] == 1.0
    assert rows[0]["B_p"] == 2.0


def test_constants_csv_decimal_point(capsys):
    code, out, _ = run(capsys, "constants", "--p", "3,4", "--format", "csv")
    assert code == 0
    rows = list(csv.reader(csv_body(out)))
    assert rows[0] == ["p", "A_p", "A_p/2", "B_p"]
    assert all("," not in c and "." in c for c in rows[1][1:])


def test_embed_atom_at_half(capsys):
    body = run_json(capsys, "embed", "--theta", '{"monomial": 3}',
                    "--mu", '{"atoms": [{"z": [0.5, 0], "w": 1}]}', "--p", "2", "--q", "2")
    assert body["result"]["squared"] == pytest.approx(21 / 16, rel=1e-12)


def test_endpoint_sweep_monotone(capsys):
    code, out, _ = run(capsys, "endpoint-sweep")
    assert code == 0
    rows = list(csv.DictReader(csv_body(out)))
    r = [float(x["r(a)"]) for x in rows]
    assert len(r) == 9 and all(b > a for a, b in zip(r, r[1:]))


def test_endpoint_sweep_precondition(capsys):
    code, _, err = run(capsys, "endpoint-sweep", "--a", "0.2")
    assert_error(code, err, "PRECONDITION")


def test_lp_counterexample(capsys):
    code, out, _ = run(capsys, "lp-counterexample", "--a", "0.9,0.95")
    assert code == 0
    assert csv_body(out)[0] == "a,norm3_cubed,energy3,R(a),R(a)*(1-a),N_used"


def test_check_solid_and_real_part(capsys):
    rep = run_json(capsys, "check-solid", "--op", "differentiation", "--trials", "3")["report"]
    assert not rep["witness"]["passed"]
    w = run_json(capsys, "real-part", '{"-1": 0.5, "1": 0.5}', "--theta", '{"monomial": 2}')["witness"]
    assert w["verdict"] is True


# ---------------------------------------------------------------- suite

def test_suite_rejects_tiny_grid(capsys):
    code, _, err = run(capsys, "suite", "--grid", "8")
    assert_error(code, err, "GRID_TOO_SMALL")


def test_suite_deterministic(capsys):
    argv = ("suite", "--only", "superquadratic,solidity", "--seed", "7")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["passed"]


def test_suite_unknown_name(capsys):
    code, _, err = run(capsys, "suite", "--only", "bogus")
    assert_error(code, err, "USAGE")


# ---------------------------------------------------------------- config file and script

def test_env_config_defaults(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 11, "format": "json", "grid": 1024}))
    monkeypatch.setenv("QUASISQUARE_CONFIG", str(cfg))
    body = run_json(capsys, "constants", "--p", "4")
    assert body["config"]["seed"] == 11 and body["config"]["grid"] == 1024
    assert run_json(capsys, "constants", "--p", "4", "--seed", "3")["config"]["seed"] == 3


def test_env_config_unknown_key(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    monkeypatch.setenv("QUASISQUARE_CONFIG", str(cfg))
    code, _, err = run(capsys, "constants", "--p", "4")
    assert_error(code, err, "BAD_INPUT")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quasisquare.cli", "constants", "--p", "4"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["B_p"] == 2.0
    bad = subprocess.run([sys.executable, "-m", "quasisquare.cli", "qsq", "[1]", "--p", "2"],
                         capture_output=True, text=True, timeout=120)
    assert bad.returncode == EXIT_CODES["BAD_EXPONENT"]
    assert ERROR_LINE.match(bad.stderr.strip())
