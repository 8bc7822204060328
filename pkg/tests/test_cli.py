import json
import math
import shutil
import subprocess

import pytest

from hyperarr.arrangement import builtin
from hyperarr.cli import dumps, main, run


def ok(*argv):
    code, out = run(list(argv))
    assert code == 0, out
    return out


def test_modular_on_ex_ss_not_enough():
    out = ok("modular", "builtin:ex_ss_not_enough")
    assert out["has_enough_modular"] is False
    assert out["is_supersolvable"] is True
    assert sorted(out["modular_by_codim"]["1"]) == ["<x1, x2 - x3>", "<x2, x3>"]


def test_bar_duality_on_ex_irred():
    out = ok("bar", "builtin:ex_irred", "--weight", "2")
    assert [w["n"] for w in out["weights"]] == [1, 2]
    for w in out["weights"]:
        assert w["dim_A"] == w["dim_B_dual"] == w["dim_B_kernel"]
        assert w["duality"] is True
    assert all(out["identities"].values())


def test_assoc_on_three_points():
    out = ok("assoc", "--arrangement", "p1-0-1-inf", "--weight", "2")
    re, im = out["series"]["0|1"]
    assert abs(abs(re) - math.pi ** 2 / 6) < 1e-6 and abs(im) < 1e-9
    assert out["composition_defect"] < 1e-6
    assert ok("assoc", "--arrangement", "builtin:p1:0,1,inf", "--weight", "2") == out


def test_mzv():
    out = ok("mzv", "2", "1")
    assert abs(out["value"][0] - 1.2020569031595942) < 1e-10
    assert out["weight"] == 3 and out["tail_bound"] < 1e-12


def test_analyze_is_the_union_of_the_summaries():
    src = "builtin:ex_irred"
    whole = ok("analyze", src)
    for cmd in ("lattice", "modular", "nested"):
        part = ok(cmd, src)
        for key, value in part.items():
            assert dumps(whole[key]) == dumps(value), key


def test_output_is_deterministic():
    for argv in (["analyze", "builtin:monomial:1,2"], ["charts", "builtin:braid:3", "--nested", "2"]):
        assert dumps(run(argv)[1]) == dumps(run(argv)[1])
    assert dumps(run(["--seed", "5", "analyze", "builtin:ex_pred3"])[1]) == dumps(run(["analyze", "builtin:ex_pred3"])[1])


def test_arrangement_json_file(tmp_path):
    path = tmp_path / "a.json"
    path.write_text(json.dumps(builtin("ex_irred").to_json()))
    assert ok("lattice", str(path))["flats"] == ok("lattice", "builtin:ex_irred")["flats"]


def test_charts_output():
    out = ok("charts", "builtin:monomial:1,2")
    assert out["retractions"]
    assert not any("error" in r for r in out["retractions"])


def test_charts_records_missing_retractions():
    out = ok("charts", "builtin:ex_pred3")
    errors = [r["error"] for r in out["retractions"] if "error" in r]
    assert errors and all(e["code"] == "NotEnoughGModular" for e in errors)


@pytest.mark.parametrize(
    "argv",
    [
        ["lattice", "/no/such/file.json"],
        ["lattice", "builtin:nope"],
        ["bar", "builtin:ex_irred", "--weight", "9"],
        ["assoc", "--points", "0,1", "--weight", "5"],
        ["mzv", "1", "2"],
        ["charts", "builtin:braid:3", "--nested", "999"],
    ],
)
def test_validation_errors_exit_with_2(argv):
    code, out = run(argv)
    assert code == 2
    assert set(out) == {"code", "message", "context"}
    assert isinstance(out["code"], str) and out["message"]


def test_bad_json_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2, "hyperplanes": [["0", "0"]]}')
    code, out = run(["lattice", str(path)])
    assert code == 2 and out["code"] == "ZeroCovector"


def test_main_prints_json(capsys):
    assert main(["mzv", "2"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert abs(printed["value"][0] - math.pi ** 2 / 6) < 1e-10


@pytest.mark.skipif(shutil.which("hyperarr") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["hyperarr", "modular", "builtin:ex_ss_not_enough"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["is_supersolvable"] is True
    res = subprocess.run(["hyperarr", "mzv", "1"], capture_output=True, text=True)
    assert res.returncode == 2
