"""The r x r Stiefel-Whitney determinant that obstructs codimension jumps.

For a diagram space of n chords and an N-dimensional function space put
``q = N - n``.  The matrix has ``entry(i, k) = w_{q + r - i + k}`` (rows and
columns counted from 1), so the bottom-left corner is ``w_{q+1}`` and the
top-right corner is ``w_{q+2r-1}``.  When every square vanishes its
determinant collapses to the product of the anti-diagonal, and a nonzero
anti-diagonal product forces systems of n independent conditions whose
codimension is at most ``n - r``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import permutations

from .cohomology import CohClass, cup, ones, sw_class

# reference thresholds: r -> {N - n: minimal n}
LISTED_THRESHOLDS = {
    2: {0: 6, 1: 10, 3: 14, 4: 16, 5: 18, 6: 26},
    3: {1: 18, 2: 22, 3: 26, 4: 34},
    4: {1: 30},
}


def _w(n: int, d: int) -> CohClass:
    if d == 0:
        return CohClass.unit(n)
    return sw_class(n, d)  # zero for d < 0


def porteous_matrix(n: int, N: int, r: int) -> list[list[CohClass]]:
    if r < 1 or N < n:
        raise ValueError(f"need r >= 1 and N >= n, got n={n}, N={N}, r={r}")
    q = N - n
    return [[_w(n, q + r - i + k) for k in range(1, r + 1)] for i in range(1, r + 1)]


def porteous_det(n: int, N: int, r: int) -> CohClass:
    """Permutation expansion of the determinant; signs vanish mod 2."""
    m = porteous_matrix(n, N, r)
    degree = r * (N - n + r)
    total = CohClass.zero(n, degree)
    prefix = {(): CohClass.unit(n)}
    for perm in permutations(range(r)):
        # perm arrives in lexicographic order, so every proper prefix is cached
        for length in range(1, r + 1):
            key = perm[:length]
            if key not in prefix:
                prev = prefix[key[:-1]]
                prefix[key] = prev if not prev else cup(prev, m[length - 1][key[-1]])
        term = prefix[perm]
        if term:
            total = total + term
    return total


def antidiagonal_product(n: int, N: int, r: int) -> CohClass:
    if r < 1 or N < n:
        raise ValueError(f"need r >= 1 and N >= n, got n={n}, N={N}, r={r}")
    q = N - n
    acc = CohClass.unit(n)
    for i in range(1, r + 1):
        acc = cup(acc, _w(n, q + 2 * i - 1))
        if not acc:
            return CohClass.zero(n, r * (q + r))
    return acc


def degeneracy_decision(n: int, N: int, r: int) -> bool:
    """True when every N-dimensional space admits n independent conditions
    of codimension <= n - r."""
    return bool(antidiagonal_product(n, N, r))


def forced(n: int, N: int, r: int) -> bool:
    """Decision closed downward in N.

    A drop forced in every N'-dimensional space is forced in every subspace of
    smaller dimension, while the determinant test itself is not monotone in N.
    """
    return any(degeneracy_decision(n, M, r) for M in range(max(N, n), 2 * n + 1))


def rank_one_predicts(n: int, N: int) -> bool:
    return N < 2 * n - ones(n)


@dataclass
class CorrTable:
    n_max: int
    r_max: int
    q_max: int
    grid: dict = field(default_factory=dict)  # (r, q, n) -> bool

    def decision(self, r: int, q: int, n: int) -> bool:
        return self.grid[(r, q, n)]

    def minimal_n(self, r: int, q: int):
        """Smallest n0 with a true decision for every n0 <= n <= n_max."""
        best = None
        for n in range(self.n_max, 0, -1):
            if self.grid[(r, q, n)]:
                best = n
            else:
                break
        return best

    def minimal_n_forced(self, r: int, q: int):
        best = None
        for n in range(self.n_max, 0, -1):
            if forced(n, n + q, r):
                best = n
            else:
                break
        return best

    def first_true(self, r: int, q: int):
        return next((n for n in range(1, self.n_max + 1) if self.grid[(r, q, n)]), None)

    def listed_bound(self, r: int, q: int):
        """Reference threshold for offset q; a listed offset k also covers q <= k."""
        listed = [n for k, n in LISTED_THRESHOLDS.get(r, {}).items() if k >= q]
        return min(listed) if listed else None

    def rows(self):
        out = []
        for r in range(1, self.r_max + 1):
            for q in range(self.q_max + 1):
                out.append({
                    "r": r, "offset": q,
                    "minimal_n": self.minimal_n(r, q),
                    "minimal_n_forced": self.minimal_n_forced(r, q),
                    "listed_n": self.listed_bound(r, q),
                    "listed": q in LISTED_THRESHOLDS.get(r, {}),
                })
        return out

    def to_json(self):
        return {
            "n_max": self.n_max, "r_max": self.r_max, "q_max": self.q_max,
            "summary": self.rows(),
            "grid": [[r, q, n, v] for (r, q, n), v in sorted(self.grid.items())],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["r", "offset", "minimal_n",
                                                 "minimal_n_forced", "listed_n",
                                                 "listed"])
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [
            f"Minimal n (with n <= {self.n_max}) such that codimension <= n - r is "
            "forced for N = n + offset.",
            "",
            "The determinant column uses N itself; the forced column also counts "
            "larger N' >= N, since a drop forced in a bigger space passes to subspaces.",
            "",
            "The listed column holds the reference thresholds; a value in parentheses "
            "is inherited from a larger listed offset.",
            "",
            "| r | N - n | minimal n (determinant) | minimal n (forced) | listed |",
            "|---|---|---|---|---|",
        ]
        for row in self.rows():
            mn = "-" if row["minimal_n"] is None else str(row["minimal_n"])
            mf = "-" if row["minimal_n_forced"] is None else str(row["minimal_n_forced"])
            if row["listed"]:
                ref = str(row["listed_n"])
            elif row["listed_n"] is not None:
                ref = f"(<= {row['listed_n']})"
            else:
                ref = ""
            lines.append(f"| {row['r']} | {row['offset']} | {mn} | {mf} | {ref} |")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "md":
            return self.to_markdown()
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2)
        raise ValueError(f"unknown format {fmt!r}")


def corr_table(n_max: int, r_max: int, q_max: int = 8) -> CorrTable:
    if not (1 <= n_max <= 64 and 1 <= r_max <= 6):
        raise ValueError("need 1 <= n_max <= 64 and 1 <= r_max <= 6")
    table = CorrTable(n_max, r_max, q_max)
    for r in range(1, r_max + 1):
        for q in range(q_max + 1):
            for n in range(1, n_max + 1):
                table.grid[(r, q, n)] = degeneracy_decision(n, n + q, r)
    return table
