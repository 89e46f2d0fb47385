import csv
import json
from fractions import Fraction

import pytest

from distproofs.cli import COLUMNS, main
from distproofs.engine import best_adversary_exact
from distproofs.netconfig import build_path, dump, load
from distproofs.protocols import amos_private


def read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        assert reader.fieldnames == COLUMNS
        return list(reader)


@pytest.fixture
def instances(tmp_path):
    d = tmp_path / "inst"
    d.mkdir()
    dump(build_path(3, ["0", "1", "0"]), d / "b-yes.json")
    dump(build_path(3, ["1", "1", "0"]), d / "a-no.json")
    dump(build_path(3, ["0", "11", "0"]), d / "c-bad.json")
    return d


def test_decide_writes_sorted_rows_and_manifest(instances, tmp_path):
    out = tmp_path / "decide.csv"
    assert main(["decide", "--instances", str(instances), "--language", "AMOS", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [r["instance_id"] for r in rows] == ["a-no", "b-yes", "c-bad"]
    assert [r["membership"] for r in rows] == ["no", "yes", "malformed"]
    manifest = json.loads((tmp_path / "decide.csv.manifest.json").read_text())
    assert manifest["status"] == "pass" and manifest["rows"] == 3 and manifest["columns"] == COLUMNS


def test_run_exact_reports_fractions(instances, tmp_path):
    out = tmp_path / "run.csv"
    assert main(["run", "--instances", str(instances / "b-yes.json"), "--out", str(out)]) == 0
    (row,) = read_rows(out)
    assert row["eval_mode"] == "exact" and row["acceptance_num"] == row["acceptance_den"]
    assert row["protocol"] == "amos-shared" and row["randomness_mode"] == "shared"


def test_soundness_scan_matches_library(instances, tmp_path):
    out = tmp_path / "scan.csv"
    code = main(["soundness-scan", "--instances", str(instances / "a-no.json"), "--protocol", "amos-private",
                 "--out", str(out)])
    assert code == 0
    (row,) = read_rows(out)
    rep = best_adversary_exact(load(instances / "a-no.json"), amos_private(Fraction(1, 4)))
    assert (int(row["acceptance_num"]), int(row["acceptance_den"])) == (rep.winning, rep.total)
    assert row["adversary_mode"].startswith(rep.method)


def test_failure_exit_code_and_stderr(instances, tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = main(["run", "--instances", str(instances / "a-no.json"), "--protocol", "amos-private",
                 "--eps", "0.4", "--out", str(out)])
    assert code == 0  # a no-instance under honest play is not a failure
    code = main(["soundness-scan", "--instances", str(instances / "a-no.json"), "--protocol", "amos-private",
                 "--eps", "0.25", "--cap", "2", "--out", str(out)])
    assert code == 2
    assert json.loads((tmp_path / "run.csv.manifest.json").read_text())["status"] == "error"
    assert "CapExceeded" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["run", "--instances", "x", "--protocol", "nope"],
    ["run", "--instances", "x", "--mode", "mc"],
    ["run", "--instances", "/definitely/missing/*.json"],
    ["decide", "--instances", "x"],
    ["sm-eq", "--variant", "other"],
    ["fix-coins", "--protocol", "amos-private", "--delta", "0.1"],
    ["gen", "--family", "amos"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err.startswith("distproofs ")


def test_stdout_when_no_out(instances, capsys):
    assert main(["decide", "--instances", str(instances), "--language", "TCE"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(COLUMNS) and len(lines) == 4


def test_sm_eq_exact_and_report_merge(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sm-eq", "--bits", "2", "--out", str(a)]) == 0
    assert main(["sm-eq", "--bits", "2", "--variant", "reduction", "--out", str(b)]) == 0
    merged = tmp_path / "merged.csv"
    assert main(["report", "--instances", str(tmp_path / "[ab].csv"), "--out", str(merged)]) == 0
    rows = read_rows(merged)
    assert len(rows) == 32
    assert rows == sorted(rows, key=lambda r: (r["instance_id"], r["protocol"]))


def test_gen_and_derandomize(tmp_path):
    inst = tmp_path / "gen"
    assert main(["gen", "--family", "amos", "--max-n", "3", "--out", str(inst)]) == 0
    assert len(list(inst.glob("*.json"))) > 0
    out = tmp_path / "der.csv"
    assert main(["derandomize", "--instances", str(inst), "--variant", "am", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert {r["adversary_mode"] for r in rows} <= {"honest", "seedwise"}
