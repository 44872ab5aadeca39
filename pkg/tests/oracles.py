"""Independent reference implementations used only by the tests.

They share no code with the package: plain Gaussian elimination over
Fraction, divided-power words as (generator, multiplicity) tuples with the
binomial coefficient computed by math.comb, cycle detection by DFS, and
threshold decisions through straight products of w-classes.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb


def fraction_rank(rows) -> int:
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return 0
    rank, cols = 0, len(m[0])
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def eval_rows(pairs, N):
    """Rows (b^k - a^k)_{k=1..N} with exact arithmetic."""
    return [[Fraction(b) ** k - Fraction(a) ** k for k in range(1, N + 1)]
            for a, b in pairs]


def has_cycle(pairs) -> bool:
    """DFS on the endpoint multigraph; any back edge closes a cycle."""
    adj = {}
    for idx, (a, b) in enumerate(pairs):
        adj.setdefault(a, []).append((b, idx))
        adj.setdefault(b, []).append((a, idx))
    seen = set()
    for root in adj:
        if root in seen:
            continue
        stack = [(root, None)]
        while stack:
            v, via = stack.pop()
            if v in seen:
                return True
            seen.add(v)
            for w, idx in adj[v]:
                if idx != via:
                    stack.append((w, idx))
    return False


# -- divided powers as tuples --------------------------------------------------

def words(n: int, d: int):
    """Words ((j, a), ...) with weight sum a*2^j <= n and degree d."""
    out = []

    def rec(j, w, deg, acc):
        if deg == d:
            out.append(tuple(acc))
            return
        if (1 << j) > n - w:
            return
        a = 1
        while w + a * (1 << j) <= n and deg + a * ((1 << j) - 1) <= d:
            rec(j + 1, w + a * (1 << j), deg + a * ((1 << j) - 1), acc + [(j, a)])
            a += 1
        rec(j + 1, w, deg, acc)

    rec(1, 0, 0, [])
    return out


def word_weight(word) -> int:
    return sum(a << j for j, a in word)


def word_mul(x, y, n):
    """y_j^(a) y_j^(b) = C(a+b, a) y_j^(a+b); None when zero mod 2 or too heavy."""
    d = dict(x)
    for j, b in y:
        a = d.get(j, 0)
        if comb(a + b, a) % 2 == 0:
            return None
        d[j] = a + b
    w = tuple(sorted(d.items()))
    return w if word_weight(w) <= n else None


def class_mul(c1, c2, n):
    out = set()
    for x in c1:
        for y in c2:
            z = word_mul(x, y, n)
            if z is not None:
                out ^= {z}
    return out


def w_class(n, d):
    if d < 0:
        return set()
    return set(words(n, d))


def decision(n, N, r) -> bool:
    acc = {()}
    for i in range(1, r + 1):
        acc = class_mul(acc, w_class(n, N - n + 2 * i - 1), n)
        if not acc:
            return False
    return True


def det_classes(n, N, r):
    """Permutation expansion with the w-class entries, all in tuple form."""
    from itertools import permutations

    q = N - n
    ent = [[w_class(n, q + r - i + k) if q + r - i + k > 0 else
            ({()} if q + r - i + k == 0 else set())
            for k in range(1, r + 1)] for i in range(1, r + 1)]
    total = set()
    for perm in permutations(range(r)):
        acc = {()}
        for i, k in enumerate(perm):
            acc = class_mul(acc, ent[i][k], n)
        total ^= acc
    return total


# -- equivalence classes by brute force -----------------------------------------

def blocks(pairs):
    parent = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            x = parent[x]
        return x

    for a, b in pairs:
        parent[find(a)] = find(b)
    groups = {}
    for v in list(parent):
        groups.setdefault(find(v), set()).add(v)
    return frozenset(frozenset(g) for g in groups.values())


def forests(grid, n):
    chords = list(combinations(sorted(grid), 2))
    for combo in combinations(chords, n):
        if not has_cycle(combo):
            yield combo
