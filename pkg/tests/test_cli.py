import json
import subprocess
import sys

import pytest

from semiact.cli import main
from semiact.dynamics import COUNTEREXAMPLE_DICT


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_counterexample_text(capsys):
    code, out, _ = run(capsys, "verify", "counterexample")
    assert code == 0
    assert "PASS  relations" in out
    assert '"via": "|1"' in out and '"x": "0|1"' in out and '"z": "|0"' in out


def test_verify_json_schema(capsys):
    code, out, _ = run(capsys, "verify", "counterexample", "--format", "json")
    rep = json.loads(out)
    assert code == 0
    assert set(rep) == {"suite", "config", "checks"}
    assert rep["config"] == {"suite": "counterexample", "depth": 4, "box": 1, "dict": None, "jobs": 1}
    for c in rep["checks"]:
        assert {"name", "paper_ref", "status"} <= set(c)
    code, out, _ = run(capsys, "verify", "scalar", "--format", "json", "--timing")
    rep = json.loads(out)
    assert "elapsed_ms" in rep and all("elapsed_ms" in c for c in rep["checks"])


def test_reports_are_deterministic(capsys):
    outs = [run(capsys, "verify", "lattice", "--format", "json", "--jobs", str(j))[1] for j in (1, 1, 2, 2)]
    assert outs[0] == outs[1]
    assert outs[2] == outs[3]
    assert json.loads(outs[0])["checks"] == json.loads(outs[2])["checks"]


def test_violation_exit_code(capsys, tmp_path):
    f = tmp_path / "counter.dict"
    f.write_text(COUNTEREXAMPLE_DICT.to_text())
    code, out, _ = run(capsys, "verify", "cocycle", "--dict", str(f), "--depth", "2", "--box", "1")
    assert code == 1
    assert "FAIL" in out and "witness" in out


def test_usage_errors(capsys, tmp_path):
    broken = tmp_path / "broken.dict"
    broken.write_text("width=3\n000\n001\n")
    assert run(capsys, "verify", "cocycle", "--dict", str(broken))[0] == 2
    bad = tmp_path / "bad.dict"
    bad.write_text("width=3\n00\n")
    assert run(capsys, "verify", "cocycle", "--dict", str(bad))[0] == 2
    assert run(capsys, "verify", "cocycle", "--dict", str(tmp_path / "missing"))[0] == 2
    assert run(capsys, "verify", "nope")[0] == 2
    assert run(capsys, "verify", "scalar", "--depth", "0")[0] == 2
    assert run(capsys, "search-dictionaries", "--width", "6")[0] == 2
    assert run(capsys, "eval", "V[g=(1,-1)] ind(", "--at", "|0")[0] == 2


@pytest.mark.parametrize("width,count", [(1, 2), (2, 4), (3, 16)])
def test_search_counts(capsys, width, count):
    code, out, _ = run(capsys, "search-dictionaries", "--width", str(width), "--format", "json")
    rep = json.loads(out)
    assert code == 0 and rep["count"] == count


def test_search_flags(capsys):
    rep = json.loads(run(capsys, "search-dictionaries", "--width", "3", "--format", "json")[1])
    row = next(r for r in rep["dictionaries"] if r["dict"] == str(COUNTEREXAMPLE_DICT))
    assert not row["relations_commute"] and not row["star_commuting"]
    assert row["relation_witness"] and row["star_witness"]
    rep = json.loads(run(capsys, "search-dictionaries", "--width", "2", "--format", "json")[1])
    row = next(r for r in rep["dictionaries"] if r["dict"] == "{01,10}")
    assert row["star_commuting"] and row["relations_commute"]


def test_eval(capsys):
    assert run(capsys, "eval", "V[g=(1,-1)] ind(1)", "--at", "|0")[1].strip() == "1/2"
    assert run(capsys, "eval", "L[n=1] ind(1)", "--at", "0|1")[1].strip() == "1/2"
    assert run(capsys, "eval", "V[g=3/2] x", "--at", "0")[1].strip() == "1/4"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "semiact", "verify", "scalar"], capture_output=True, text=True)
    assert r.returncode == 0 and "3/3 checks passed" in r.stdout
