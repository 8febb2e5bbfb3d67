import json
import math
import subprocess
import sys

import pytest

from eisprim.cli import main

ZETA3 = 1.2020569031595942


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_lvalue(capsys):
    code, out, _ = run(["eval", "lvalue", "--N", "1", "--k", "4", "--v", "0,0", "--l", "3"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["schema"] == 1
    assert rec["Lambda"]["re"] == pytest.approx(0, abs=1e-15)
    assert rec["Lambda"]["im"] == pytest.approx(2 * math.pi / 3 * ZETA3)


def test_eval_cocycle(capsys):
    code, out, _ = run(["eval", "cocycle", "--gamma", "1,1;0,1", "--k", "4", "--N", "2", "--v", "1,0"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["value"]["degree"] == 2 and len(rec["value"]["coeffs"]) == 3
    assert rec["word"] == ["T"]


def test_eval_primitive_both(capsys):
    code, out, _ = run(["eval", "primitive", "--k", "4", "--N", "2", "--v", "1,0", "--tau", "0,1", "--method", "both"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert "lattice_value" in rec and rec["difference"] < 1e-4


def test_eval_eisenstein_oracle(capsys):
    argv = ["eval", "eisenstein", "--k", "4", "--N", "3", "--v", "1,2", "--tau", "0.1,1.1", "--method", "both", "--M", "200"]
    code, out, _ = run(argv, capsys)
    rec = json.loads(out)
    assert code == 0 and rec["difference"] < rec["lattice_error"]


def test_hauptmodul_check(capsys):
    code, out, _ = run(["eval", "hauptmodul-check", "--N", "2", "--cusp", "1,1", "--tau", "0.5,1.5"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["difference"] < 1e-6


def test_hauptmodul_check_level_five_fails(capsys):
    code, _, err = run(["eval", "hauptmodul-check", "--N", "5", "--cusp", "1,0", "--tau", "0.1,1.2"], capsys)
    assert code == 3 and "tolerance" in err


def test_inf_cusp_serialized(capsys):
    code, out, _ = run(["eval", "hauptmodul-check", "--N", "2", "--cusp", "1,0"], capsys)
    assert json.loads(out)["cusp_value"] == "inf"


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "lvalue", "--tau", "0,-1"],
        ["eval", "lvalue", "--v", "1"],
        ["eval", "cocycle", "--gamma", "1,1;1,1"],
        ["eval", "lvalue", "--N", "0"],
        ["bogus"],
    ],
)
def test_argument_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_semantic_error(capsys):
    code, _, err = run(["eval", "lvalue", "--k", "4", "--l", "4"], capsys)
    assert code == 2 and "invalid input" in err


def test_tolerance_failure(capsys):
    argv = ["eval", "eisenstein", "--k", "4", "--N", "1", "--v", "0,0", "--method", "both", "--M", "20", "--tol", "1e-12"]
    code, _, _ = run(argv, capsys)
    assert code == 3


def test_verify_lvalues(capsys):
    code, out, _ = run(["verify", "lvalues", "--seed", "7", "--samples", "2"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["status"] == "pass"
    assert all(r["status"] == "pass" for r in rec["rows"])


def test_verify_equivariance(capsys):
    code, out, _ = run(["verify", "equivariance", "--k", "4", "--N", "3", "--seed", "1"], capsys)
    assert code == 0 and json.loads(out)["status"] == "pass"


def test_verify_weight2_reports_offset(capsys):
    # the raw lattice clause fails by 2 pi L_v; with the box constant removed it passes
    code, out, _ = run(["verify", "weight2", "--N", "2", "--samples", "2"], capsys)
    raw, shifted, invariance = json.loads(out)["rows"]
    assert code == 3
    assert raw["status"] == "fail" and raw["max_deviation"] == pytest.approx(2 * math.pi**2 * math.log(2), abs=5e-3)
    assert "box offset" in shifted["check"] and shifted["status"] == "pass"
    assert invariance["status"] == "pass"


def test_table_lvalues_csv(capsys):
    code, out, _ = run(["table", "lvalues", "--k", "4", "--N", "2", "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 1 + 12
    assert lines[0].split(",") == ["L", "Lambda", "a", "b", "l"]


def test_table_qexp(capsys):
    code, out, _ = run(["table", "qexp", "--kind", "XI", "--k", "4", "--N", "2", "--v", "0,1", "--Q", "20"], capsys)
    rec = json.loads(out)
    assert len(rec["rows"]) == 21
    assert rec["rows"][0]["coeff"]["re"] == pytest.approx(1 / 120)


def test_table_cocycles(capsys):
    code, out, _ = run(["table", "cocycles", "--k", "4", "--N", "2", "--v", "1,0", "--length", "3"], capsys)
    rec = json.loads(out)
    assert code == 0 and len(rec["rows"]) == 3 + 9 + 27


def test_text_format(capsys):
    code, out, _ = run(["eval", "lvalue", "--format", "text", "--k", "3", "--N", "3", "--v", "0,1", "--l", "2"], capsys)
    assert code == 0 and "schema: 1" in out


def test_byte_identical_subprocess():
    argv = [sys.executable, "-m", "eisprim.cli", "verify", "cocycle-identities", "--seed", "3", "--samples", "3"]
    a = subprocess.run(argv, capture_output=True, check=True)
    b = subprocess.run(argv, capture_output=True, check=True)
    assert a.stdout == b.stdout and a.stdout
