import json
import subprocess
import sys

import pytest

from rp2series import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_list(capsys):
    code, out = run(capsys, "verify", "--list")
    assert code == 0
    ids = out.split()
    assert "dsb4.chain" in ids and "remark.f129" in ids
    assert len(cli.CLAIMS) >= 50


def test_claim_json(capsys):
    code, out = run(capsys, "verify", "--claim", "bnabz.n3", "dsbn.b2.chain", "--format", "json", "--deterministic")
    assert code == 0
    report = json.loads(out)
    assert [c["id"] for c in report["claims"]] == ["bnabz.n3", "dsbn.b2.chain"]
    c = report["claims"][0]
    assert set(c) == {"id", "class", "status", "paper_anchor", "summary", "details", "elapsed_ms"}
    assert c["status"] == "PASS" and c["details"]["invariants"] == [0, [2, 2]] and c["elapsed_ms"] == 0
    assert report["summary"]["pass"] == 2


def test_deterministic_output(capsys):
    args = ("verify", "--claim", "lcsbn.b2.q16", "wp.examples", "--format", "json", "--deterministic")
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a == b


def test_failing_claim_sets_exit_code(capsys):
    code, out = run(capsys, "verify", "--claim", "fullpres.n4.relator_list")
    assert code == 1
    assert "FAIL" in out


def test_consistency_claim(capsys):
    code, out = run(capsys, "verify", "--claim", "dsb4.identities", "--format", "json")
    assert code == 0
    assert json.loads(out)["claims"][0]["status"] == "CONSISTENT"


@pytest.mark.parametrize("argv", [["verify", "--claim", "no.such"], ["verify"], ["series", "--group", "bogus"]])
def test_usage_errors(capsys, argv):
    assert cli.main(argv) == 2


def test_series(capsys):
    code, out = run(capsys, "series", "--group", "bn:2", "--depth", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert [r["invariants"] for r in rows] == [[0, [2, 2]], [0, [4]], [0, []]]


def test_enumerate_and_abelianize(tmp_path, capsys):
    p = tmp_path / "q8.txt"
    p.write_text("gens: x y\nrel: x^2 y^-2\nrel: y x y^-1 x\n")
    s = tmp_path / "sub.txt"
    s.write_text("x\n")
    assert run(capsys, "enumerate", "--presentation", str(p))[1].strip() == "8"
    assert run(capsys, "enumerate", "--presentation", str(p), "--subgroup", str(s))[1].strip() == "2"
    code, out = run(capsys, "abelianize", "--presentation", str(p))
    assert code == 0 and json.loads(out) == {"free_rank": 0, "torsion": [2, 2]}
    assert cli.main(["abelianize", "--presentation", str(tmp_path / "missing.txt")]) == 2


def test_enumeration_cap_is_reported(tmp_path, capsys):
    p = tmp_path / "inf.txt"
    p.write_text("gens: a b\nrel: a^2\n")
    code = cli.main(["enumerate", "--presentation", str(p), "--max-cosets", "100"])
    assert code != 0


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "rp2series", "verify", "--claim", "bnabz.n1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "PASS" in r.stdout
