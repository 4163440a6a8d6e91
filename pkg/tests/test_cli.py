import json
from fractions import Fraction as F

import pytest

from lpcons.cli import main, run_command
from lpcons.cuts import CutCertificate, verify_certificate
from lpcons.model import BinarySystem, LinIneq
from lpcons.modelfile import load_model, parse_model

from conftest import MODELS

EX1, EX3, EX7, SEC7 = (str(MODELS / f) for f in ("example1.mod", "example3.mod", "example7.mod", "section7.mod"))


def run_json(*argv):
    code, rep = run_command(["--format", "json", *argv])
    return code, json.loads(rep.render("json"))


def _row(d):
    return LinIneq.make({int(j): F(c) for j, c in d["coeffs"].items()}, F(d["rhs"]))


def test_lp_consistent_example_exits_zero():
    code, doc = run_json("check", EX1, "--property", "lp")
    assert code == 0 and doc["verdict"] is True and doc["exit_code"] == 0


def test_sequential_lp_failure_exits_one_with_witness():
    code, doc = run_json("check", EX7, "--property", "seq-lp-k:2")
    assert code == 1 and doc["witness"] == {"x1": 0}


def test_cut_certificate_is_replayable_offline():
    code, doc = run_json("cut-test", EX1, "--clause", "x1 x3")
    assert code == 0 and doc["is_cut"]
    cert = doc["certificate"]
    assert all("/" in m for m in cert["multipliers"])
    # rebuild the system and certificate from the JSON alone
    S = parse_model(doc["model"]).system
    assert [_row(r) for r in cert["rows_with_box"]] == list(S.rows_with_box())
    c = CutCertificate(tuple(F(m) for m in cert["multipliers"]), _row(cert["target"]),
                       F(cert["combination"]["rhs"]))
    assert verify_certificate(S, c)


def test_non_cut_exits_one():
    code, doc = run_json("cut-test", EX1, "--clause", "x1 -x3")
    assert code == 1 and doc["is_cut"] is False


def test_cut_derive_both_outcomes():
    code, doc = run_json("cut-derive", EX1, "--assign", "x1=0,x3=0")
    assert code == 0 and doc["clause"]["literals"] == [1, 3]
    code, doc = run_json("cut-derive", EX1, "--assign", "x1=0,x3=1")
    assert code == 1 and doc["derived"] is False and len(doc["lp_point"]) == 4


def test_lnp_reports_projection_and_writes_model(tmp_path):
    out = tmp_path / "aug.mod"
    code, doc = run_json("lnp", EX7, "--k", "2", "--output", str(out))
    assert code == 0 and doc["sequential_lp_k_after"] and doc["projection_verified"]
    assert [r["text"] for r in doc["added"]] == ["x1 >= 1/2"]
    m = load_model(str(out))
    assert m.system.rows[-1] == LinIneq.make({1: 1}, F(1, 2)) and m.objective == {1: -1, 2: 3}
    code, doc = run_json("search", str(out), "--prune", "lp", "--order", "1,2")
    assert code == 0 and doc["backtracks"] == 0


def test_search_and_bnb_on_the_two_variable_system():
    code, doc = run_json("search", EX7, "--prune", "lp", "--order", "x1,x2")
    assert code == 0 and doc["backtracks"] == 1 and doc["solution"] == [1, 0]
    code, doc = run_json("bnb", EX7, "--root-cuts", "1,2")
    assert code == 0 and doc["nodes"] == 5 and doc["solution"] == [1, 1] and doc["value"] == "2/1"
    assert doc["cuts"][0]["text"] == "x1 - 4 x2 >= -3"


def test_closure_modes():
    code, doc = run_json("closure", EX3)
    assert code == 0 and [r["text"] for r in doc["added"]] == ["x2 >= 1"]
    code, doc = run_json("closure", SEC7, "--mode", "input")
    assert code == 0 and len(doc["added"]) == 12 and doc["proof_steps"]


def test_verify_suite_and_seed_flag():
    code, doc = run_json("verify", "--suite", "prop4", "--seeds", "5", "--seed", "2")
    assert code == 0 and doc["ok"] and doc["checked"] == 5 and doc["seed"] == 2


def test_global_flags_work_before_or_after_the_subcommand():
    a = run_command(["--format", "json", "check", EX3, "--property", "k:2"])
    b = run_command(["check", EX3, "--property", "k:2", "--format", "json"])
    assert a[0] == b[0] == 1
    assert a[1].data["witness"] == b[1].data["witness"]


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["check", EX1],
    ["check", EX1, "--property", "k"],
    ["check", EX1, "--property", "k:9"],
    ["check", EX1, "--property", "lp:2"],
    ["cut-test", EX1, "--clause", "x9"],
    ["cut-test", EX1, "--clause", "x1 -x1"],
    ["cut-derive", EX1, "--assign", "x1=2"],
    ["lnp", EX1, "--k", "0"],
    ["search", EX1, "--order", "1,1,2,3"],
    ["bnb", EX1],
    ["bnb", EX7, "--root-cuts", "5"],
    ["verify", "--suite", "prop1", "--seeds", "0"],
    ["check", "missing.mod", "--property", "lp"],
    ["--cap", "2", "check", EX1, "--property", "consistent"],
])
def test_usage_errors_exit_two(argv):
    code, rep = run_command(argv)
    assert code == 2 and rep.data.get("error")


def test_parse_errors_carry_position(tmp_path):
    bad = tmp_path / "bad.mod"
    bad.write_text("vars 2\nx1 + x3 >= 1\n")
    code, rep = run_command(["check", str(bad), "--property", "lp"])
    assert code == 2 and "line 2, column 6" in rep.data["error"]


def test_environment_cap_is_honoured(monkeypatch):
    monkeypatch.setenv("LPCONS_ENUM_CAP", "3")
    assert run_command(["check", EX1, "--property", "domain"])[0] == 2
    assert run_command(["--cap", "4", "check", EX1, "--property", "domain"])[0] == 0


def test_main_prints_text_and_json(capsys):
    assert main(["check", EX7, "--property", "lp"]) == 1
    out = capsys.readouterr().out
    assert "lp: fails" in out and "witness: x1=0" in out
    assert main(["cut-test", EX1, "--clause", "x1 x3", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["is_cut"] is True
    assert main(["check"]) == 2
    assert "usage" in capsys.readouterr().err
