import json
from fractions import Fraction

import jsonschema
import pytest

from chordlab.diagram import make_diagram
from chordlab.report import Cache, Report, atomic_write_text, validate_report


def sample():
    return Report("rank", {"x": Fraction(1, 3)}, verdicts={"s": {3, 1, 2}},
                  witnesses=[make_diagram([(0, 1)])], counts={"k": 2})


def test_fraction_and_set_serialization():
    data = sample().to_json()
    assert data["params"] == {"x": "1/3"}
    assert data["verdicts"]["s"] == [1, 2, 3]
    assert data["witnesses"] == [{"chords": [["0/1", "1/1"]]}]
    validate_report(data)


def test_schema_rejects_missing_fields():
    data = sample().to_json()
    del data["task"]
    with pytest.raises(jsonschema.ValidationError):
        validate_report(data)


def test_dumps_deterministic():
    a, b = sample(), sample()
    b.elapsed_ms = 99.0
    assert a.dumps(with_elapsed=False) == b.dumps(with_elapsed=False)
    assert a.dumps() != b.dumps()


def test_write_round_trip(tmp_path):
    path = tmp_path / "sub" / "r.json"
    sample().write(path)
    data = json.loads(path.read_text())
    validate_report(data)
    assert data["task"] == "rank"
    assert [p.name for p in path.parent.iterdir()] == ["r.json"]


def test_atomic_write_keeps_old_file_on_error(tmp_path):
    path = tmp_path / "a.txt"
    atomic_write_text(path, "old")


    with pytest.raises(TypeError):
        atomic_write_text(path, 123)
    assert path.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]


def test_ok_flag():
    assert sample().ok
    assert not Report("t", {}, failures=[{"x": 1}]).ok


def test_cache(tmp_path):
    c = Cache(tmp_path)
    assert c.get("betti", {"n": 3}) is None
    c.put("betti", {"n": 3}, [1, 2])
    assert c.get("betti", {"n": 3}) == [1, 2]
    assert c.get("betti", {"n": 4}) is None
    for p in tmp_path.iterdir():
        p.write_text("{not json")
    assert c.get("betti", {"n": 3}) is None


def test_cache_unwritable_directory_is_silent(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    Cache(blocker / "sub").put("k", {"n": 1}, 1)
