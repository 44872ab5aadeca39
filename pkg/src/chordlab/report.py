"""Structured results, JSON persistence and the on-disk oracle cache."""
from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((_jsonable(v) for v in obj), key=json.dumps)
    if hasattr(obj, "item"):  # numpy scalar
        return obj.item()
    return obj


@dataclass
class Report:
    task: str
    params: dict
    failures: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0
    version: str = __version__

    @classmethod
    def make(cls, task, params, started=None, **kw):
        rep = cls(task, dict(params), **kw)
        if started is not None:
            rep.elapsed_ms = round((time.perf_counter() - started) * 1000.0, 3)
        return rep

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return _jsonable({
            "task": self.task,
            "params": self.params,
            "failures": self.failures,
            "verdicts": self.verdicts,
            "witnesses": self.witnesses,
            "counts": self.counts,
            "elapsed_ms": self.elapsed_ms,
            "version": self.version,
        })

    def dumps(self, with_elapsed: bool = True) -> str:
        data = self.to_json()
        if not with_elapsed:
            data.pop("elapsed_ms")
        return json.dumps(data, indent=2, sort_keys=True)

    def write(self, path) -> None:
        validate_report(self.to_json())
        atomic_write_text(path, self.dumps() + "\n")


def report_schema() -> dict:
    text = resources.files("chordlab").joinpath("report_schema.json").read_text()
    return json.loads(text)


def validate_report(data: dict) -> None:
    import jsonschema

    jsonschema.validate(data, report_schema())


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def default_cache_dir() -> Path:
    env = os.environ.get("CHORDLAB_CACHE")
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "chordlab"


class Cache:
    """Advisory key/value store of JSON blobs; unreadable entries count as misses."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def _path(self, kind: str, params: dict) -> Path:
        key = "-".join(f"{k}{params[k]}" for k in sorted(params))
        return self.directory / f"{kind}-v{__version__}-{key}.json"

    def get(self, kind: str, params: dict):
        path = self._path(kind, params)
        try:
            blob = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if not isinstance(blob, dict) or blob.get("params") != params:
            return None
        return blob.get("value")

    def put(self, kind: str, params: dict, value) -> None:
        try:
            atomic_write_text(self._path(kind, params),
                              json.dumps({"params": params, "value": value}))
        except OSError:
            pass
