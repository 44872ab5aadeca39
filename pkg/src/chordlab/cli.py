"""Command-line front end.

Exit status: 0 when every check in the run passed, 1 when the report lists
failures, 2 on usage or input errors.  ``--out`` writes the JSON report;
``--config`` reads option values from a JSON object whose keys are the long
option names of the subcommand (dashes or underscores).  Explicit command-line
values win over the config file.
"""
from __future__ import annotations

import argparse
import json
import re
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .report import Cache, Report, default_cache_dir


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n\n{self.format_usage()}")


_PAIR = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)")


def parse_chords(text: str) -> list[tuple]:
    """``"(-1,1),(0.5, 3/2)"`` -> list of exact pairs."""
    from .rational import parse_scalar

    pairs = [(parse_scalar(a), parse_scalar(b)) for a, b in _PAIR.findall(text)]
    rest = _PAIR.sub("", text).replace(",", "").strip()
    if rest or not pairs and text.strip():
        raise UsageError(f"cannot parse chords {text!r}; expected '(a,b),(c,d),...'")
    return pairs


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _shift(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("shift must be U,V")
    return tuple(_fraction(p) for p in parts)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chordlab", description="Chord diagrams, function spaces and "
                "the characteristic classes that force codimension drops.")
    p.add_argument("--version", action="version", version=f"chordlab {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file of option values")
    common.add_argument("--out", type=Path, help="write the JSON report here")
    common.add_argument("--cache-dir", type=Path, help="oracle cache directory")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("diagram", parents=[common], help="resonance and partition of a diagram")
    s.add_argument("--chords", help='chords as "(a,b),(c,d),..."')
    s.add_argument("--svg", type=Path, help="also draw the diagram")

    s = sub.add_parser("rank", parents=[common], help="codimension in a function space")
    s.add_argument("--basis", help="pp:N, expr:f1,f2,... or a basis file")
    s.add_argument("--chords", help='chords as "(a,b),(c,d),..."')
    s.add_argument("--mode", choices=["exact", "float"])

    s = sub.add_parser("search", parents=[common], help="search for degenerate diagrams")
    s.add_argument("--basis", help="pp:N, expr:f1,f2,... or a basis file")
    s.add_argument("--n", type=int)
    s.add_argument("--deficiency", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--strategy", choices=["multistart-simplex", "random", "symmetric-seed"])
    s.add_argument("--seed", type=int)

    s = sub.add_parser("porteous", parents=[common], help="threshold table")
    s.add_argument("--n-max", type=int)
    s.add_argument("--r-max", type=int)
    s.add_argument("--q-max", type=int)
    s.add_argument("--format", choices=["md", "csv", "json"])

    s = sub.add_parser("cohomology", parents=[common], help="ring model and oracle")
    s.add_argument("--n", type=int)
    s.add_argument("--oracle", action="store_true", default=None,
                   help="compare with the cell-complex oracle")

    s = sub.add_parser("cycles", parents=[common], help="square-tree configurations")
    s.add_argument("action", choices=["verify", "render"])
    s.add_argument("--j", type=int)
    s.add_argument("--eps", type=_fraction)
    s.add_argument("--samples", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--shift", type=_shift)

    s = sub.add_parser("verify-all", parents=[common], help="run the acceptance checks")
    s.add_argument("--profile", choices=["quick", "full"])
    return p


DEFAULTS = {
    "diagram": {"chords": None, "svg": None},
    "rank": {"basis": None, "chords": None, "mode": "exact"},
    "search": {"basis": None, "n": None, "deficiency": 1, "budget": 100_000,
               "strategy": "symmetric-seed", "seed": None},
    "porteous": {"n_max": 40, "r_max": 4, "q_max": 8, "format": "md"},
    "cohomology": {"n": None, "oracle": False},
    "cycles": {"j": 3, "eps": Fraction(1, 10), "samples": 1000, "seed": None,
               "shift": None},
    "verify-all": {"profile": "quick"},
}
REQUIRED = {
    "diagram": ("chords",),
    "rank": ("basis", "chords"),
    "search": ("basis", "n", "seed"),
    "cohomology": ("n",),
    "cycles": ("seed",),
}
_CONVERT = {"eps": _fraction, "shift": lambda v: _shift(v) if isinstance(v, str) else
            tuple(_fraction(str(x)) for x in v), "svg": Path}


def resolve(args) -> dict:
    """Merge defaults, config file and command line; reject unknown keys."""
    cmd = args.command
    values = dict(DEFAULTS[cmd])
    if args.config is not None:
        try:
            cfg = json.loads(args.config.read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        for key, val in cfg.items():
            k = key.replace("-", "_")
            if k not in values:
                raise UsageError(f"unknown config key {key!r} for {cmd}")
            try:
                values[k] = _CONVERT[k](val) if k in _CONVERT and val is not None else val
            except argparse.ArgumentTypeError as exc:
                raise UsageError(str(exc)) from exc
    for k in values:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    missing = [k for k in REQUIRED.get(cmd, ()) if values[k] is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise UsageError(f"{cmd}: missing required {flags}")
    return values


# -- subcommands -------------------------------------------------------------

def _diagram(v, out):
    from .diagram import (betti_one, canonical_partition, codimension_free,
                          is_resonant, make_diagram)

    t0 = time.perf_counter()
    d = make_diagram(parse_chords(v["chords"]))
    hit, witness = is_resonant(d)
    verdicts = {"resonant": hit, "codimension_free": codimension_free(d),
                "betti_one": betti_one(d),
                "partition": canonical_partition(d).to_json()}
    print(f"{d}: {'resonant' if hit else 'non-resonant'}, "
          f"free codimension {verdicts['codimension_free']}")
    if v["svg"] is not None:
        from .svg import render_svg
        render_svg(d, v["svg"])
    return Report.make("diagram", {"chords": d.to_json()}, verdicts=verdicts,
                       witnesses=[witness.to_json()] if witness else [], started=t0)


def _rank(v, out):
    from .diagram import make_diagram
    from .funcspace import basis_from_spec, codimension_in

    t0 = time.perf_counter()
    basis = basis_from_spec(v["basis"])
    d = make_diagram(parse_chords(v["chords"]))
    rank = codimension_in(d, basis, v["mode"])
    print(f"rank {rank} of {d.n} conditions in {basis.name} ({v['mode']})")
    return Report.make("rank", {"basis": basis.to_json(), "chords": d.to_json(),
                                "mode": v["mode"]},
                       verdicts={"rank": rank, "deficiency": d.n - rank}, started=t0)


def _search(v, out):
    from .funcspace import basis_from_spec
    from .search import SearchConfig, search_degenerate

    t0 = time.perf_counter()
    basis = basis_from_spec(v["basis"])
    try:
        cfg = SearchConfig(n=v["n"], r=v["deficiency"], strategy=v["strategy"],
                           budget=v["budget"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = search_degenerate(basis, cfg, v["seed"])
    certs = res.certificates
    # a certificate that does not replay is a real failure
    failures = [{"certificate": c.to_json(), "reason": "replay failed"}
                for c in certs if not c.replay(basis)]
    best = res.best()
    print(f"{len(certs)} certificate(s) after {res.evaluations} evaluations"
          + (f"; best sigma {best.sigma:.3g}" if best else ""))
    for c in certs[:3]:
        print(f"  {c.diagram}: rank {c.rank}")
    return Report.make(
        "search", {"basis": basis.to_json(), "n": cfg.n, "deficiency": cfg.r,
                   "strategy": cfg.strategy, "budget": cfg.budget, "seed": v["seed"]},
        failures=failures,
        verdicts={"certified": bool(certs), "budget_exhausted": res.budget_exhausted,
                  "best_sigma": best.sigma if best else None},
        witnesses=[c.to_json() for c in certs],
        counts={"evaluations": res.evaluations, "candidates": len(res)}, started=t0)


def _porteous(v, out):
    from .porteous import corr_table

    t0 = time.perf_counter()
    try:
        table = corr_table(v["n_max"], v["r_max"], v["q_max"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = table.render(v["format"])
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    rows = table.rows()
    # listed thresholds must at least be sufficient inside the table range
    failures = []
    for row in rows:
        if row["listed"] and row["listed_n"] <= table.n_max:
            for n in range(row["listed_n"], table.n_max + 1):
                if not table.decision(row["r"], row["offset"], n):
                    failures.append({"r": row["r"], "offset": row["offset"], "n": n})
    differs = [{"r": row["r"], "offset": row["offset"], "listed": row["listed_n"],
                "computed": row["minimal_n"]}
               for row in rows if row["listed"] and row["listed_n"] <= table.n_max
               and row["minimal_n"] != row["listed_n"]]
    return Report.make("porteous", {"n_max": v["n_max"], "r_max": v["r_max"],
                                    "q_max": v["q_max"]},
                       failures=failures,
                       verdicts={"summary": rows, "threshold_differences": differs},
                       started=t0)


def _cohomology(v, out, cache_dir):
    from . import cohomology as coh

    t0 = time.perf_counter()
    n = v["n"]
    if n < 1:
        raise UsageError("--n must be >= 1")
    counts = coh.basis_counts(n)
    verdicts = {"basis_counts": counts, "top_degree": coh.top_degree(n),
                "ones": coh.ones(n),
                "sw": {str(d): str(coh.sw_class(n, d)) for d in range(1, n + 1)
                       if coh.sw_class(n, d)}}
    failures = []
    print(f"n = {n}: Betti numbers {counts}")
    for d, c in verdicts["sw"].items():
        print(f"  w_{d} = {' + '.join(map(str, coh.sw_class(n, int(d)).monomials()))}")
    if v["oracle"]:
        try:
            oracle = coh.betti_oracle(n, Cache(cache_dir))
        except coh.SizeLimit as exc:
            raise UsageError(str(exc)) from exc
        verdicts["oracle"] = oracle
        if oracle != counts:
            failures.append({"basis_counts": counts, "oracle": oracle})
        print(f"  oracle {'agrees' if oracle == counts else 'DISAGREES'}: {oracle}")
    return Report.make("cohomology", {"n": n, "oracle": v["oracle"]},
                       failures=failures, verdicts=verdicts, started=t0)


def _cycles(v, out, action):
    from . import cycles

    if action == "render":
        from .svg import render_svg

        if out is None:
            raise UsageError("cycles render: --out FILE.svg is required")
        tree = cycles.random_tree(v["j"], random.Random(v["seed"]))
        c = cycles.build_config(tree, v["eps"])
        render_svg(c, out)
        print(f"wrote {len(c)} points, {len(c.squares)} squares to {out}")
        return None
    if v["shift"] is not None:
        rep = cycles.verify_mtool(v["j"], v["eps"], v["shift"], v["samples"], v["seed"])
    else:
        rep = cycles.verify_mtool2(v["j"], v["eps"], v["samples"], v["seed"])
    print(f"{rep.task}: {len(rep.failures)} failure(s) in {v['samples']} samples")
    return rep


def _verify_all(v, out):
    from .acceptance import verify_all

    def progress(crit, rep):
        status = "PASS" if rep.ok else "FAIL"
        print(f"[{status}] criterion {crit.number:2d}: {crit.title} "
              f"({rep.elapsed_ms / 1000:.1f}s)", flush=True)

    return verify_all(v["profile"], progress)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
        v = resolve(args)
        out = args.out
        cache_dir = args.cache_dir or default_cache_dir()
        cmd = args.command
        if cmd == "diagram":
            rep = _diagram(v, out)
        elif cmd == "rank":
            rep = _rank(v, out)
        elif cmd == "search":
            rep = _search(v, out)
        elif cmd == "porteous":
            rep = _porteous(v, out)
        elif cmd == "cohomology":
            rep = _cohomology(v, out, cache_dir)
        elif cmd == "cycles":
            rep = _cycles(v, out, args.action)
        else:
            rep = _verify_all(v, out)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"chordlab: error: {exc}", file=sys.stderr)
        return 2
    if rep is None:
        return 0
    if out is not None:
        rep.write(out)
    return 0 if rep.ok else 1


def main() -> None:
    sys.exit(run())
