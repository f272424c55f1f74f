import csv
import io
import json
import subprocess
import sys

import pytest

from moorexp.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--json")
    assert code == 0, err
    return json.loads(out)


def test_check_witness_json():
    doc = call_json("check", "--q", "2", "--n", "4", "-I", "0,2")
    res = doc["result"]
    assert doc["schema_version"] and doc["command"] == "check"
    assert res["is_moore"] is False
    w = res["witness"]
    # F_16 elements as four F_2 coordinates, each a one-entry F_2 vector
    assert w["tuple"] == [[[1], [0], [0], [0]], [[0], [1], [0], [1]]]
    assert w["codes"] == [1, 10]
    assert w["certificate"] == {"fq_rank": 2, "moore_det": 0}


def test_check_both_engines():
    res = call_json("check", "--q", "3", "--n", "5", "-I", "0,1,3", "--method", "both")["result"]
    assert set(res["work_by_engine"]) == {"kernel", "det"}


def test_output_independent_of_jobs():
    a = call("check", "--q", "2", "--n", "8", "-I", "0,2,6", "--json", "--jobs", "1")
    b = call("check", "--q", "2", "--n", "8", "-I", "0,2,6", "--json", "--jobs", "2")
    assert a[0] == b[0] == 0 and a[1] == b[1]


def test_verify_flag():
    code, out, _ = call("check", "--q", "2", "--n", "6", "-I", "0,2,4", "--verify", "--json")
    assert code == 0
    assert json.loads(out)["result"]["witness"] is not None


def test_exit_codes():
    assert call("check", "--q", "6", "--n", "4", "-I", "0,1")[0] == 2
    assert call("check", "--q", "2", "--n", "4", "-I", "0,4")[0] == 2
    assert call("check", "--q", "2", "--n", "4")[0] == 2
    assert call("nonsense")[0] == 2
    assert call("check", "--q", "2", "--n", "10", "-I", "0,1,3", "--budget", "5")[0] == 3
    code, out, err = call("count", "--q", "2", "--n", "8", "-I", "0,1,3", "--budget", "5")
    assert code == 3 and not out and err


def test_bounds_text():
    code, out, _ = call("bounds", "--q", "2", "-I", "0,1,3")
    assert code == 0 and "14" in out
    res = call_json("bounds", "--q", "2", "-I", "0,1,3")["result"]
    assert res["curve_threshold"] == 14


def test_csv_output():
    code, out, _ = call("search", "--q", "2", "--n", "5", "--k", "3", "--csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 2


@pytest.mark.parametrize("argv", [
    ["field", "--q", "4", "--n", "3"],
    ["mrd", "--q", "2", "--n", "4", "-I", "0,1"],
    ["count", "--q", "2", "--n", "4", "-I", "0,2"],
    ["symbolic", "--q", "2", "--k", "2", "-I", "0,2", "--op", "quotient"],
    ["symbolic", "--q", "2", "--op", "borges", "--i", "2", "--j", "3", "--m", "2"],
    ["symbolic", "--q", "2", "--n", "5", "-I", "0,1,2,4", "--op", "case2"],
    ["bezout-gap", "--q", "7", "--k", "4", "--i1", "1", "--ik2", "2", "--ik1", "4"],
    ["bounds", "--q", "3", "--n", "7", "-I", "0,1,3"],
])
def test_subcommands_run(argv):
    code, out, err = call(*argv, "--json")
    assert code == 0, err
    assert json.loads(out)["command"] == argv[0]


def test_symbolic_quotient_text():
    res = call_json("symbolic", "--q", "2", "--k", "2", "-I", "0,2", "--op", "quotient")["result"]
    assert "1*X1^2+1*X1^1*X2^1+1*X2^2" in json.dumps(res)


def test_cache_round_trip(tmp_path):
    argv = ["check", "--q", "2", "--n", "4", "-I", "0,2", "--json", "--cache-dir", str(tmp_path)]
    first = call(*argv)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    second = call(*argv)
    assert first == second
    # a tampered witness is rejected and recomputed
    doc = json.loads(files[0].read_text())
    doc["result"]["witness"]["codes"] = [1, 1]
    files[0].write_text(json.dumps(doc))
    third = call(*argv)
    assert third[1] == first[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "moorexp", "bounds", "--q", "2", "-I", "0,1,3",
                           "--json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["curve_threshold"] == 14
