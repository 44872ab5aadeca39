"""Finite-dimensional function spaces and the codimension of chord conditions.

For a diagram with chords ``(a_i, b_i)`` and a basis ``e_1..e_N`` the
evaluation matrix has entries ``e_k(b_i) - e_k(a_i)``; its rank is the
codimension of the subspace cut out by the conditions ``f(a_i) = f(b_i)``.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as _expr
from .diagram import ChordDiagram, DuplicateChord, is_resonant, make_diagram
from .expr import EvaluationDomainError, ExpressionSyntaxError, UnknownFunction
from .linalg import exact_rank, float_rank
from .report import Report

__all__ = [
    "Basis", "EvalMatrix", "ExactnessViolation", "InvalidDimension",
    "PreconditionViolation", "EvaluationDomainError", "ExpressionSyntaxError",
    "UnknownFunction", "parse_basis", "load_basis", "basis_from_spec",
    "polynomial_space", "eval_matrix", "codimension_in", "verify_prop1",
    "random_rational", "random_nonresonant_diagram",
]

EXACT, FLOAT = "exact", "float"


class ExactnessViolation(ValueError):
    pass


class InvalidDimension(ValueError):
    pass


class PreconditionViolation(ValueError):
    pass


@dataclass(frozen=True)
class Basis:
    name: str
    sources: tuple
    exprs: tuple

    @property
    def exact(self) -> bool:
        return all(_expr.is_exact_expr(e) for e in self.exprs)

    @property
    def N(self) -> int:
        return len(self.exprs)

    def __len__(self):
        return len(self.exprs)

    def values(self, x):
        return [_expr.evaluate(e, x) for e in self.exprs]

    def to_json(self):
        return {"name": self.name, "functions": list(self.sources), "exact": self.exact}


def _split_top_level(text: str):
    """Split on newlines and on commas outside parentheses, keeping offsets."""
    pieces = []
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "\n" or (ch == "," and depth <= 0):
            pieces.append((start, text[start:i]))
            start = i + 1
            depth = 0 if ch == "\n" else depth
    pieces.append((start, text[start:]))
    return pieces


def parse_basis(text: str, name: str = "basis") -> Basis:
    """Parse comma- or newline-separated expressions; ``#`` starts a comment.

    Syntax error offsets are relative to ``text``.
    """
    lines = []
    for line in text.split("\n"):
        cut = line.find("#")
        lines.append(line if cut < 0 else line[:cut] + " " * (len(line) - cut))
    clean = "\n".join(lines)
    sources, exprs = [], []
    for start, piece in _split_top_level(clean):
        if not piece.strip():
            continue
        try:
            node = _expr.parse_expr(piece)
        except ExpressionSyntaxError as exc:
            raise ExpressionSyntaxError(str(exc).rsplit(" at offset", 1)[0],
                                        start + exc.offset) from None
        sources.append(piece.strip())
        exprs.append(node)
    if not exprs:
        raise InvalidDimension("empty basis")
    return Basis(name, tuple(sources), tuple(exprs))


def load_basis(path) -> Basis:
    from pathlib import Path

    p = Path(path)
    return parse_basis(p.read_text(), name=p.stem)


def polynomial_space(N: int) -> Basis:
    """``x, x^2, ..., x^N``: polynomials of degree <= N with zero free term."""
    if N < 1:
        raise InvalidDimension(f"dimension must be >= 1, got {N}")
    srcs = ["x"] + [f"x^{k}" for k in range(2, N + 1)]
    return Basis(f"PP^{N}", tuple(srcs), tuple(_expr.parse_expr(s) for s in srcs))


def basis_from_spec(spec: str) -> Basis:
    """``pp:N`` for the polynomial space, otherwise a basis file path."""
    if spec.lower().startswith("pp:"):
        return polynomial_space(int(spec[3:]))
    if spec.lower().startswith("expr:"):
        return parse_basis(spec[5:], name="inline")
    return load_basis(spec)


@dataclass(frozen=True)
class EvalMatrix:
    rows: tuple  # tuple of tuples, one per chord in sorted order
    N: int
    mode: str

    @property
    def shape(self):
        return (len(self.rows), self.N)

    def to_numpy(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.N))
        return np.array([[float(v) for v in row] for row in self.rows])


def eval_matrix(d: ChordDiagram, basis: Basis, mode: str = EXACT) -> EvalMatrix:
    if mode not in (EXACT, FLOAT):
        raise ValueError(f"mode must be 'exact' or 'float', got {mode!r}")
    if mode == EXACT:
        if not basis.exact:
            raise ExactnessViolation(f"basis {basis.name} is not exactly evaluable")
        if not d.exact:
            raise ExactnessViolation("exact mode needs rational endpoints")
        conv = Fraction
    else:
        conv = float
    rows = []
    for c in d.chords:
        try:
            fa = basis.values(conv(c.a))
            fb = basis.values(conv(c.b))
        except OverflowError as exc:
            raise EvaluationDomainError(str(exc)) from exc
        rows.append(tuple(conv(vb - va) for va, vb in zip(fa, fb)))
    return EvalMatrix(tuple(rows), basis.N, mode)


def codimension_in(d: ChordDiagram, basis: Basis, mode: str = EXACT) -> int:
    m = eval_matrix(d, basis, mode)
    if not m.rows:
        return 0
    if mode == EXACT:
        return exact_rank(m.rows)
    return float_rank(m.to_numpy())


def random_rational(rng: random.Random, lo: int = -10, hi: int = 10,
                    max_den: int = 64) -> Fraction:
    q = rng.randint(1, max_den)
    return Fraction(rng.randint(lo * q, hi * q), q)


def random_nonresonant_diagram(rng: random.Random, n: int, **kw) -> ChordDiagram:
    while True:
        pairs = []
        for _ in range(n):
            a = random_rational(rng, **kw)
            b = random_rational(rng, **kw)
            while b == a:
                b = random_rational(rng, **kw)
            pairs.append((a, b))
        try:
            d = make_diagram(pairs)
        except DuplicateChord:
            continue
        if not is_resonant(d)[0]:
            return d


def verify_prop1(n: int, N: int, trials: int, seed: int) -> Report:
    """Random non-resonant rational n-diagrams must have exact rank n over PP^N."""
    if N < 2 * n - 1:
        raise PreconditionViolation(f"need N >= 2n-1, got n={n}, N={N}")
    t0 = time.perf_counter()
    rng = random.Random(seed)
    basis = polynomial_space(N)
    failures = []
    for _ in range(trials):
        d = random_nonresonant_diagram(rng, n)
        rank = codimension_in(d, basis, EXACT)
        if rank != n:
            failures.append({"diagram": d.to_json(), "rank": rank})
    return Report.make(
        "verify_prop1", {"n": n, "N": N, "trials": trials, "seed": seed},
        failures=failures, counts={"trials": trials}, started=t0,
    )
