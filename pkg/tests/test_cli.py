import json
from fractions import Fraction
import subprocess
import sys

import pytest

from chordlab.cli import parse_chords, run
from chordlab.funcspace import basis_from_spec
from chordlab.report import validate_report
from chordlab.search import DegeneracyCertificate


def report(path):
    data = json.loads(path.read_text())
    validate_report(data)
    return data


def test_parse_chords():
    assert parse_chords("(1,2), (-1/3, 4)") == [(1, 2), (Fraction(-1, 3), 4)]


def test_diagram(tmp_path, capsys):
    out = tmp_path / "d.json"
    svg = tmp_path / "d.svg"
    assert run(["diagram", "--chords", "(1,2),(2,3),(1,3)", "--out", str(out),
                "--svg", str(svg)]) == 0
    data = report(out)
    assert data["verdicts"]["resonant"] is True
    assert data["verdicts"]["codimension_free"] == 2
    assert len(data["witnesses"]) == 1
    assert svg.read_text().startswith("<?xml")
    assert "resonant" in capsys.readouterr().out


def test_rank(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["rank", "--basis", "pp:4", "--chords", "(-1,1),(-2,2),(-3,3)",
                "--out", str(out)]) == 0
    assert report(out)["verdicts"] == {"rank": 2, "deficiency": 1}
    assert run(["rank", "--basis", "pp:4", "--chords", "(-1,1)", "--mode", "float"]) == 0
    assert "rank 1" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["rank", "--basis", "frobnicate", "--chords", "(0,1)"],
    ["rank", "--basis", "pp:3"],
    ["search", "--basis", "pp:4", "--n", "3"],
    ["search", "--basis", "pp:4", "--n", "3", "--seed", "0", "--deficiency", "9"],
    ["cycles", "verify"],
    ["cycles", "verify", "--seed", "0", "--shift", "0,8"],
    ["cycles", "render", "--seed", "0"],
    ["diagram", "--chords", "(1,1)"],
    ["nonsense"],
    [],
])
def test_usage_errors(argv):
    assert run(argv) == 2


def test_config_merge_and_unknown_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"basis": "pp:4", "chords": "(-1,1),(-2,2),(-3,3)"}))
    out = tmp_path / "r.json"
    assert run(["rank", "--config", str(cfg), "--out", str(out)]) == 0
    assert report(out)["verdicts"]["rank"] == 2
    # command line overrides the file
    assert run(["rank", "--config", str(cfg), "--chords", "(0,1)", "--out", str(out)]) == 0
    assert report(out)["verdicts"]["rank"] == 1
    cfg.write_text(json.dumps({"basis": "pp:4", "colour": "red"}))
    assert run(["rank", "--config", str(cfg), "--chords", "(0,1)"]) == 2
    cfg.write_text("[1, 2]")
    assert run(["rank", "--config", str(cfg)]) == 2


def test_search_report_and_replay(tmp_path):
    out = tmp_path / "s.json"
    argv = ["search", "--basis", "pp:6", "--n", "4", "--seed", "0", "--out", str(out)]
    assert run(argv) == 0
    data = report(out)
    assert data["verdicts"]["certified"] is True
    basis = basis_from_spec("pp:6")
    for w in data["witnesses"]:
        cert = DegeneracyCertificate.from_json(w)
        assert cert.replay(basis)


def test_search_deterministic_up_to_elapsed(tmp_path):
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    for o in outs:
        assert run(["search", "--basis", "pp:3", "--n", "3", "--seed", "4", "--budget",
                    "2000", "--strategy", "multistart-simplex", "--out", str(o)]) == 0
    a, b = (report(o) for o in outs)
    a.pop("elapsed_ms"), b.pop("elapsed_ms")
    assert a == b


def test_porteous(tmp_path, capsys):
    out = tmp_path / "p.json"
    assert run(["porteous", "--n-max", "40", "--out", str(out)]) == 0
    data = report(out)
    diffs = {(d["r"], d["offset"]): (d["listed"], d["computed"])
             for d in data["verdicts"]["threshold_differences"]}
    assert diffs[(2, 6)] == (26, 20) and diffs[(3, 4)] == (34, 30)
    assert "|" in capsys.readouterr().out
    assert run(["porteous", "--n-max", "12", "--format", "csv"]) == 0
    assert run(["porteous", "--r-max", "0"]) == 2


def test_cohomology(tmp_path):
    out = tmp_path / "c.json"
    assert run(["cohomology", "--n", "6", "--oracle", "--cache-dir", str(tmp_path),
                "--out", str(out)]) == 0
    data = report(out)
    assert data["verdicts"]["oracle"] == data["verdicts"]["basis_counts"]
    assert run(["cohomology", "--n", "0"]) == 2


def test_cycles(tmp_path):
    out = tmp_path / "v.json"
    assert run(["cycles", "verify", "--j", "2", "--samples", "50", "--seed", "1",
                "--out", str(out)]) == 0
    assert report(out)["failures"] == []
    assert run(["cycles", "verify", "--j", "2", "--samples", "50", "--seed", "1",
                "--shift", "0,9"]) == 0
    svg = tmp_path / "t.svg"
    assert run(["cycles", "render", "--j", "3", "--seed", "2", "--out", str(svg)]) == 0
    assert svg.read_text().count("<circle") == 8
    assert run(["cycles", "verify", "--seed", "0", "--eps", "1/4"]) == 2


def test_verify_all_quick(capsys):
    assert run(["verify-all", "--profile", "quick"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[")]
    assert len(lines) == 14 and all(l.startswith("[PASS]") for l in lines)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "chordlab", "rank", "--basis", "pp:2",
                          "--chords", "(-1,1),(-2,2)"], capture_output=True, text=True)
    assert res.returncode == 0 and "rank 1" in res.stdout
