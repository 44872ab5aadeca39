"""Mod-2 cohomology ring of the configuration spaces B(R^2, n).

The ring is the weight-truncated divided-power algebra on generators ``y_j``
(``j >= 1``) of degree ``2^j - 1`` and weight ``2^j``: a word
``prod y_j^(a_j)`` has weight ``sum a_j 2^j`` and survives in
``H^*(B(R^2, n))`` iff its weight is at most ``n``.  Products follow the
divided-power rule ``y^(a) y^(b) = C(a+b, a) y^(a+b)`` reduced mod 2.

Internally a word is stored as a bitmask over the exterior generators
``y_j^(2^k)`` (the binary digits of each ``a_j``).  By Lucas' theorem
``C(a+b, a)`` is odd iff ``a & b == 0``, so the product of two words is the
union of their masks when they are disjoint and zero otherwise.

The total Stiefel-Whitney class of the bundle of functions on a
configuration is the sum of all words; ``sw_class(n, d)`` is its degree-d
part.  ``betti_oracle`` recomputes the additive structure independently from
the cell complex indexed by compositions of ``n``.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .linalg import gf2_rank
from .report import Cache, Report


class BudgetMismatch(ValueError):
    pass


class SizeLimit(ValueError):
    pass


def ones(n: int) -> int:
    """Number of ones in the binary expansion of n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return bin(n).count("1")


def binom_mod2(a: int, b: int) -> int:
    """C(a, b) mod 2 via Lucas: odd iff the bits of b are a subset of a's."""
    if b < 0 or b > a:
        return 0
    return 1 if (a & b) == b else 0


# -- exterior generators y_j^(2^k) ------------------------------------------

def _gen_pos(j: int, k: int) -> int:
    s = j + k
    return s * (s - 1) // 2 + k


@lru_cache(maxsize=None)
def _gen_of_pos(pos: int) -> tuple[int, int]:
    s = 1
    while (s + 1) * s // 2 <= pos:
        s += 1
    k = pos - s * (s - 1) // 2
    return s - k, k


def _generators(n: int) -> list[tuple[int, int, int, int]]:
    """(bit, weight, degree, j) for every exterior generator of weight <= n."""
    out = []
    s = 1
    while (1 << s) <= n:
        for k in range(s):
            j = s - k
            out.append((1 << _gen_pos(j, k), 1 << s, (1 << k) * ((1 << j) - 1), j))
        s += 1
    return out


@lru_cache(maxsize=None)
def mask_weight(mask: int) -> int:
    w = 0
    while mask:
        low = mask & -mask
        j, k = _gen_of_pos(low.bit_length() - 1)
        w += 1 << (j + k)
        mask ^= low
    return w


@lru_cache(maxsize=None)
def mask_degree(mask: int) -> int:
    d = 0
    while mask:
        low = mask & -mask
        j, k = _gen_of_pos(low.bit_length() - 1)
        d += (1 << k) * ((1 << j) - 1)
        mask ^= low
    return d


def mask_to_exps(mask: int) -> tuple:
    exps = {}
    while mask:
        low = mask & -mask
        j, k = _gen_of_pos(low.bit_length() - 1)
        exps[j] = exps.get(j, 0) + (1 << k)
        mask ^= low
    return tuple(sorted(exps.items()))


def exps_to_mask(exps) -> int:
    mask = 0
    for j, a in exps:
        if j < 1 or a < 1:
            raise ValueError(f"bad exponent pair {(j, a)}")
        k = 0
        while a:
            if a & 1:
                mask |= 1 << _gen_pos(j, k)
            a >>= 1
            k += 1
    return mask


@dataclass(frozen=True, order=True)
class DPMonomial:
    """Divided-power word ``prod y_j^(a_j)`` as sorted ``(j, a_j)`` pairs."""

    exps: tuple = ()

    def __post_init__(self):
        exps = tuple(sorted((int(j), int(a)) for j, a in self.exps))
        if any(a < 1 or j < 1 for j, a in exps) or len({j for j, _ in exps}) != len(exps):
            raise ValueError(f"malformed word {self.exps}")
        object.__setattr__(self, "exps", exps)

    @property
    def weight(self) -> int:
        return sum(a << j for j, a in self.exps)

    @property
    def degree(self) -> int:
        return sum(a * ((1 << j) - 1) for j, a in self.exps)

    @property
    def mask(self) -> int:
        return exps_to_mask(self.exps)

    @classmethod
    def from_mask(cls, mask: int) -> "DPMonomial":
        return cls(mask_to_exps(mask))

    def sort_key(self):
        return (self.degree, self.exps)

    def to_json(self):
        return [[j, a] for j, a in self.exps]

    def __str__(self):
        if not self.exps:
            return "1"
        return " ".join(f"y{j}" if a == 1 else f"y{j}^({a})" for j, a in self.exps)


def _monomial_key(mask: int):
    return (mask_degree(mask), mask_to_exps(mask))


@lru_cache(maxsize=None)
def _masks_by_degree(n: int) -> dict:
    """All words of weight <= n, bucketed by degree, in canonical order."""
    gens = _generators(n)
    buckets: dict[int, list[int]] = {}

    def rec(i, mask, weight, degree):
        if i == len(gens):
            buckets.setdefault(degree, []).append(mask)
            return
        rec(i + 1, mask, weight, degree)
        bit, w, d, _ = gens[i]
        if weight + w <= n:
            rec(i + 1, mask | bit, weight + w, degree + d)

    rec(0, 0, 0, 0)
    return {d: tuple(sorted(ms, key=_monomial_key)) for d, ms in buckets.items()}


def basis(n: int, d: int) -> list[DPMonomial]:
    """All divided-power words of degree d and weight <= n."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    return [DPMonomial.from_mask(m) for m in _masks_by_degree(n).get(d, ())]


def top_degree(n: int) -> int:
    return max(_masks_by_degree(n))


class CohClass:
    """A homogeneous element of H^degree(B(R^2, n); Z_2)."""

    __slots__ = ("n", "degree", "support")

    def __init__(self, n: int, degree: int, support: Iterable[int] = ()):
        self.n = n
        self.degree = degree
        self.support = frozenset(support)
        for m in self.support:
            if mask_weight(m) > n or mask_degree(m) != degree:
                raise ValueError(f"word {DPMonomial.from_mask(m)} does not fit "
                                 f"weight {n} / degree {degree}")

    @classmethod
    def _raw(cls, n, degree, support):
        obj = cls.__new__(cls)
        obj.n, obj.degree, obj.support = n, degree, frozenset(support)
        return obj

    @classmethod
    def from_monomials(cls, n: int, degree: int, words) -> "CohClass":
        acc = set()
        for w in words:
            w = w if isinstance(w, DPMonomial) else DPMonomial(w)
            acc ^= {w.mask}
        return cls(n, degree, acc)

    @classmethod
    def zero(cls, n: int, degree: int) -> "CohClass":
        return cls._raw(n, degree, ())

    @classmethod
    def unit(cls, n: int) -> "CohClass":
        return cls._raw(n, 0, (0,))

    def is_zero(self) -> bool:
        return not self.support

    def __bool__(self):
        return bool(self.support)

    def monomials(self) -> list[DPMonomial]:
        return [DPMonomial.from_mask(m) for m in sorted(self.support, key=_monomial_key)]

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        if self.n != other.n:
            return False
        if not self.support and not other.support:
            return True
        return self.degree == other.degree and self.support == other.support

    def __hash__(self):
        return hash((self.n, self.degree if self.support else None, self.support))

    def __add__(self, other: "CohClass") -> "CohClass":
        if self.n != other.n:
            raise BudgetMismatch(f"weight budgets differ: {self.n} vs {other.n}")
        if not other.support:
            return self
        if not self.support:
            return other
        if self.degree != other.degree:
            raise ValueError("sum of classes of different degrees")
        return CohClass._raw(self.n, self.degree, self.support ^ other.support)

    def __mul__(self, other: "CohClass") -> "CohClass":
        return cup(self, other)

    def __repr__(self):
        body = " + ".join(map(str, self.monomials())) or "0"
        return f"CohClass(n={self.n}, deg={self.degree}: {body})"

    def to_json(self):
        return {"n": self.n, "degree": self.degree,
                "monomials": [m.to_json() for m in self.monomials()]}

    @classmethod
    def from_json(cls, data) -> "CohClass":
        return cls.from_monomials(data["n"], data["degree"],
                                  [DPMonomial(tuple(map(tuple, m))) for m in data["monomials"]])


def cup(c1: CohClass, c2: CohClass) -> CohClass:
    if c1.n != c2.n:
        raise BudgetMismatch(f"weight budgets differ: {c1.n} vs {c2.n}")
    n = c1.n
    acc = set()
    right = [(y, mask_weight(y)) for y in c2.support]
    for x in c1.support:
        room = n - mask_weight(x)
        for y, wy in right:
            if not x & y and wy <= room:
                acc ^= {x | y}
    return CohClass._raw(n, c1.degree + c2.degree, acc)


def sw_class(n: int, d: int) -> CohClass:
    """Degree-d Stiefel-Whitney class of the bundle of functions on n points."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 0:
        return CohClass.zero(n, d)
    return CohClass._raw(n, d, _masks_by_degree(n).get(d, ()))


def total_sw(n: int) -> list[CohClass]:
    return [sw_class(n, d) for d in range(top_degree(n) + 1)]


def dual_total_class(n: int) -> list[CohClass]:
    """Components of the inverse of the total class, degrees 0..top."""
    w = total_sw(n)
    top = len(w) - 1
    inv = [CohClass.unit(n)]
    for k in range(1, top + 1):
        acc = CohClass.zero(n, k)
        for i in range(1, k + 1):
            acc = acc + cup(w[i], inv[k - i])
        inv.append(acc)
    return inv


def square_check(n: int, trials: int, seed: int) -> Report:
    """Random positive-degree classes must square to zero."""
    t0 = time.perf_counter()
    rng = random.Random(seed)
    top = top_degree(n)
    failures = []
    sampled = 0
    if top >= 1:
        for _ in range(trials):
            d = rng.randint(1, top)
            words = _masks_by_degree(n)[d]
            support = [m for m in words if rng.random() < 0.5] or [rng.choice(words)]
            c = CohClass._raw(n, d, support)
            sampled += 1
            sq = cup(c, c)
            if sq:
                failures.append({"class": c.to_json(), "square": sq.to_json()})
    return Report.make("square_check", {"n": n, "trials": trials, "seed": seed},
                       failures=failures, counts={"sampled": sampled}, started=t0)


# -- independent additive oracle ----------------------------------------------

ORACLE_MAX_N = 16


def _compositions_by_degree(n: int):
    """Compositions of n as cut sets over gaps 1..n-1, bucketed by degree.

    A cut set S gives |S| + 1 parts; its degree is n - 1 - |S|.
    """
    buckets = [[] for _ in range(n)]
    for cuts in range(1 << (n - 1)):
        buckets[n - 1 - bin(cuts).count("1")].append(cuts)
    return buckets


def _parts(n: int, cuts: int) -> list[int]:
    parts, last = [], 0
    for g in range(1, n):
        if cuts >> (g - 1) & 1:
            parts.append(g - last)
            last = g
    parts.append(n - last)
    return parts


def coboundary(n: int, cuts: int) -> list[int]:
    """Cells hit by d(cell): merge parts i, i+1 with coefficient C(m_i+m_{i+1}, m_i)."""
    out = []
    parts = _parts(n, cuts)
    pos = 0
    for i in range(len(parts) - 1):
        pos += parts[i]
        if binom_mod2(parts[i] + parts[i + 1], parts[i]):
            out.append(cuts & ~(1 << (pos - 1)))
    return out


def _betti_compute(n: int) -> list[int]:
    cells = _compositions_by_degree(n)
    index = [{c: i for i, c in enumerate(cs)} for cs in cells]
    ranks = []
    for p in range(n - 1):
        rows = []
        for c in cells[p]:
            v = 0
            for t in coboundary(n, c):
                v ^= 1 << index[p + 1][t]
            rows.append(v)
        ranks.append(gf2_rank(rows))
    ranks.append(0)
    return [len(cells[p]) - ranks[p] - (ranks[p - 1] if p else 0) for p in range(n)]


def _plausible_betti(n: int, value) -> bool:
    if not isinstance(value, list) or len(value) != n:
        return False
    if not all(isinstance(b, int) and b >= 0 for b in value):
        return False
    # Euler characteristic of the cochain complex
    from math import comb
    chi = sum((-1) ** p * comb(n - 1, p) for p in range(n))
    return sum((-1) ** p * b for p, b in enumerate(value)) == chi


def betti_oracle(n: int, cache: Cache | None = None) -> list[int]:
    """dim H^d(B(R^2, n); Z_2) for d = 0..n-1 from the composition complex."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > ORACLE_MAX_N:
        raise SizeLimit(f"oracle limited to n <= {ORACLE_MAX_N} (2^(n-1) cells)")
    if cache is not None:
        hit = cache.get("betti", {"n": n})
        if _plausible_betti(n, hit):
            return hit
    value = _betti_compute(n)
    if cache is not None:
        cache.put("betti", {"n": n}, value)
    return value


def basis_counts(n: int) -> list[int]:
    by_deg = _masks_by_degree(n)
    return [len(by_deg.get(d, ())) for d in range(n)]
