from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest

from latticecodes.cli import EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, SCHEMA, main

TABLE1_D3 = "1,0,4;0,1,5;0,0,7"
BELL3 = "2,0,4;0,1,3;0,0,5"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_search_3d(capsys):
    code, out = run_json(capsys, "search", "--dim", "3", "--systole", "4")
    assert code == EXIT_OK and out["schema"] == SCHEMA
    row = out["rows"][0]
    assert row["det"] == 12 and row["ratio"] == 0.1875
    assert [[1, 0, 3], [0, 1, 5], [0, 0, 12]] in row["witnesses"]


def test_search_sliceable(capsys):
    code, out = run_json(capsys, "search", "--dim", "3", "--systole", "2", "--slices", "2")
    assert code == EXIT_OK and out["rows"][0]["det"] == 4


def test_budget_exhausted(capsys):
    code, out = run_json(capsys, "search", "--dim", "3", "--systole", "5", "--budget", "50")
    assert code == EXIT_BUDGET
    assert out["incomplete"] is True and out["schema"] == SCHEMA
    assert out["partial"]["dets_scanned"]


def test_distance_budget(capsys):
    code, out = run_json(capsys, "distance", TABLE1_D3, "--w-max", "6", "--budget", "10")
    assert code == EXIT_BUDGET and out["incomplete"]


def test_long_gate(capsys):
    assert run(capsys, "distance", "hadamard", "--w-max", "8")[0] == EXIT_BUDGET
    assert run(capsys, "search", "--dim", "4", "--systole", "5")[0] == EXIT_BUDGET
    code, out = run_json(capsys, "tables", "shallow")
    assert code == EXIT_OK and [r["expected"] for r in out["rows"]] == [3]


def test_distance(capsys):
    code, out = run_json(capsys, "distance", TABLE1_D3, "--w-max", "5", "--translation")
    assert code == EXIT_OK
    # strings give Z distance 3; X logicals are membranes, heavier than 5
    assert out["reports"]["Z"]["weight"] == 3
    assert out["reports"]["X"]["weight"] is None and out["reports"]["X"]["result"] == "> 5"


def test_mismatch_exit(capsys):
    code, out = run_json(capsys, "starfish", TABLE1_D3, "--order", "+1,-1,+2,+3,-2,-3")
    assert code == EXIT_MISMATCH and out["verified"] is False
    assert out["circuit_distance"] == 2 and out["code_distance"] == 3


def test_starfish(capsys):
    code, out = run_json(capsys, "starfish", TABLE1_D3)
    assert code == EXIT_OK and out["circuit_distance"] == 3


def test_slice(capsys):
    code, out = run_json(capsys, "slice", BELL3, "--seed", "3")
    assert code == EXIT_OK and out["twisted_product_agrees"]


def test_inject(capsys):
    code, out = run_json(capsys, "inject", "--code", "five", "--trials", "10")
    assert code == EXIT_OK and out["k"] == 1 and out["round_trips"]["exact"] == 10
    code, out = run_json(capsys, "inject", "1,1;0,2", "--trials", "5")
    assert code == EXIT_OK and len(out["sets"]["u"]) == out["k"] == 2


def test_inject_k_zero(tmp_path, capsys):
    from latticecodes.code import StabilizerCode

    p = tmp_path / "code.json"
    p.write_text(json.dumps(StabilizerCode.css([[1, 1]], [[1, 1]]).to_json()))
    code, out = run_json(capsys, "inject", "--code", str(p), "--trials", "3")
    assert code == EXIT_OK and out["k"] == 0 and out["sets"]["u"] == []


def test_surgery(capsys):
    code, out = run_json(capsys, "surgery", "2,0,0,0;0,2,0,0;0,0,2,0;0,0,0,2", "--row", "4")
    assert code == EXIT_OK
    assert out["rows"][0]["boundary_distance"] == {"X": 4, "Z": 4}


def test_symmetry(capsys):
    code, out = run_json(capsys, "symmetry", "3,0;0,3")
    assert code == EXIT_OK and out["schema"] == SCHEMA


def test_tables(capsys):
    code, out = run_json(capsys, "tables", "2")
    assert code == EXIT_OK
    assert [r["det"] for r in out["rows"]] == [4, 10, 16, 30, 44]
    assert all(r["match"] for r in out["rows"])


@pytest.mark.parametrize("argv", [["search", "--dim", "3", "--systole", "3"], ["inject", "--code", "five", "--trials", "5"]])
def test_formats(capsys, argv):
    _, js = run(capsys, *argv, "--format", "json")
    assert json.loads(js)["schema"] == SCHEMA
    _, cs = run(capsys, *argv, "--format", "csv")
    rows = list(csv.reader(io.StringIO(cs)))
    assert "schema" in rows[0] or ["schema", SCHEMA] in rows
    _, tx = run(capsys, *argv, "--format", "text")
    assert f"schema: {SCHEMA}" in tx


@pytest.mark.parametrize("argv", [["slice", BELL3], ["inject", "--code", "five", "--trials", "5"]])
def test_same_seed_same_bytes(capsys, argv):
    a = run(capsys, *argv, "--seed", "9", "--format", "json")
    b = run(capsys, *argv, "--seed", "9", "--format", "json")
    assert a == b


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "latticecodes.cli", "search", "--dim", "2", "--systole", "2", "--format", "json"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(out.stdout)["rows"][0]["det"] == 2


def test_bad_subcommand():
    with pytest.raises(SystemExit) as e:
        main(["nope"])
    assert e.value.code == 2
