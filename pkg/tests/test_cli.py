import json
import subprocess
import sys

import pytest

from mcrkit import cli
from mcrkit.errors import InvariantViolation


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def comb(tmp_path):
    p = tmp_path / "comb.json"
    assert run("gen", "comb", "--param", "teeth=8", "--seed", 1, "--out", p) == 0
    return p


def test_solve_verify_fixed(tmp_path, comb, capsys):
    for algo in ("baseline", "sensitive"):
        out = tmp_path / f"{algo}.json"
        assert run("solve", "fixed", "--instance", comb, "--algo", algo, "--out", out, "--svg", tmp_path / "s.svg") == 0
        res = json.loads(out.read_text())
        assert res["count"] == 1 and res["k"] == 16 and res["solver"] == f"fixed-{algo}"
        assert run("verify", "--instance", comb, "--result", out) == 0
    assert (tmp_path / "s.svg").read_text().startswith("<?xml")
    assert "OK" in capsys.readouterr().out


def test_verify_mismatch_exits_nonzero(tmp_path, comb):
    out = tmp_path / "r.json"
    run("solve", "fixed", "--instance", comb, "--out", out)
    res = json.loads(out.read_text())
    res["count"] += 1
    out.write_text(json.dumps(res))
    assert run("verify", "--instance", comb, "--result", out) != 0


def test_segment_chain_3d_and_oracles(tmp_path):
    seg, box = tmp_path / "seg.json", tmp_path / "box.json"
    run("gen", "star", "--params", '{"m": 8, "n": 6, "segment": true}', "--seed", 4, "--out", seg)
    run("gen", "box3d", "--param", "n=4", "--seed", 2, "--out", box)
    doc = json.loads(seg.read_text())
    chain = tmp_path / "chain.json"
    doc.update(kind="chain2d", chain=doc.pop("segment") + [[0.2, 0.9]])
    chain.write_text(json.dumps(doc))
    for fam, inst in (("segment", seg), ("chain", chain), ("3d", box)):
        out = tmp_path / f"{fam}-res.json"
        assert run("solve", fam, "--instance", inst, "--out", out) == 0
        assert run("verify", "--instance", inst, "--result", out) == 0
    s = json.loads((tmp_path / "segment-res.json").read_text())
    o = tmp_path / "o.json"
    assert run("oracle", "segment", "--instance", seg, "--grid", 64, "--out", o) == 0
    assert json.loads(o.read_text())["count"] <= s["count"]
    assert run("oracle", "3d", "--instance", box, "--samples", 5000, "--out", o) == 0
    assert json.loads(o.read_text())["count"] <= json.loads((tmp_path / "3d-res.json").read_text())["count"]
    assert run("verify", "--instance", box, "--result", o) == 0
    assert run("render", "--instance", seg, "--result", tmp_path / "segment-res.json", "--mode", "curves",
               "--svg", tmp_path / "c.svg") == 0


def test_scp_answer(tmp_path):
    p, out = tmp_path / "scp.json", tmp_path / "r.json"
    run("gen", "scp", "--param", "n=3", "--param", "answer=false", "--seed", 3, "--out", p)
    assert run("solve", "fixed", "--instance", p, "--out", out) == 0
    assert json.loads(out.read_text())["answer"] is False
    assert run("oracle", "fixed", "--instance", p, "--out", out) == 0
    assert json.loads(out.read_text())["answer"] is False


def test_exit_codes(tmp_path, comb, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "fixed2d", "points": [[0, 0]]')
    assert run("solve", "fixed", "--instance", bad) == 2
    bad.write_text('{"kind": "fixed2d", "polygon": {"outer": [[0,0],[1,1],[1,0],[0,1]]}, "center": [0,0]}')
    assert run("solve", "fixed", "--instance", bad) == 2
    assert run("solve", "segment", "--instance", comb) == 3
    assert run("render", "--instance", comb, "--mode", "curves") == 3
    assert run("gen", "comb", "--param", "teeth=1") == 3

    def boom(*a, **k):
        raise InvariantViolation("forced")

    monkeypatch.setattr("mcrkit.fixed.solve_fixed_output_sensitive", boom)
    assert run("solve", "fixed", "--instance", comb, "--algo", "sensitive") == 4


def test_reproducible_result_files(tmp_path, comb):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run("solve", "fixed", "--instance", comb, "--algo", "sensitive", "--out", a)
    run("solve", "fixed", "--instance", comb, "--algo", "sensitive", "--out", b, "--parallel")
    pa = json.loads(a.read_text())
    pb = json.loads(b.read_text())
    pa["config"].pop("parallel"), pb["config"].pop("parallel")
    pa.pop("wall_time"), pb.pop("wall_time")
    assert pa == pb


def test_bench_table(capsys):
    assert run("bench", "--sizes", "4,8", "--repeat", 1) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3 and lines[0].split()[0] == "teeth"


def test_console_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "mcrkit.cli", "gen", "star", "--seed", "1"], capture_output=True,
                       text=True, env={"MCRKIT_LOG": "DEBUG", "PATH": ""}, check=True)
    assert json.loads(p.stdout)["kind"] == "fixed2d"
