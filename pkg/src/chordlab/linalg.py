"""Rank computations: exact over Q, numerical over R, and over GF(2)."""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np


def _integer_rows(rows):
    out = []
    for row in rows:
        row = [Fraction(x) for x in row]
        scale = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * scale) for x in row])
    return out


def exact_rank(rows) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination.

    Each row is first scaled to integers; the elimination then stays in Z.
    """
    m = _integer_rows(rows)
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        pivot = next((i for i in range(rank, n_rows) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, n_rows):
            f = m[i][col]
            row_i, row_r = m[i], m[rank]
            for k in range(col, n_cols):
                # Sylvester's identity keeps the division exact
                row_i[k] = (p * row_i[k] - f * row_r[k]) // prev
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def singular_values(matrix) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def float_rank(matrix, rel: float = 1e-10) -> int:
    """Numerical rank with threshold ``rel * sigma_max * max(rows, cols)``."""
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return 0
    s = singular_values(a)
    tau = rel * s[0] * max(a.shape)
    return int(np.sum(s > tau))


def gf2_rank(rows) -> int:
    """Rank over GF(2) of rows given as Python int bitmasks."""
    pivots = {}  # leading bit -> row
    rank = 0
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                rank += 1
                break
    return rank
