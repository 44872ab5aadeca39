"""Square-tree configurations and their resonance-free translates.

A depth-j tree stores one point ``A`` of the basic square (vertices
``(+-1, +-1)``) at every internal node.  Depth 1 gives the pair ``{A, -A}``;
depth j places two depth-(j-1) configurations at ``A`` and ``-A``, shrunk by
``eps * chi(A)^u_j`` and ``eps * chi(-A)^u_j``.  All arithmetic is exact.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .diagram import ChordDiagram, make_diagram, is_resonant
from .report import Report

Point = tuple  # (Fraction, Fraction)

MAX_EPS = Fraction(1, 10)
PERIMETER = 8


class EpsTooLarge(ValueError):
    pass


class ShiftTooSmall(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class UT:
    j: int
    u: int
    T: int


@lru_cache(maxsize=None)
def ut_sequence(j: int) -> UT:
    if j < 2:
        raise ValueError("the recursion starts at j = 2")
    if j == 2:
        return UT(2, 1, 2)
    prev = ut_sequence(j - 1)
    u = prev.u + prev.T + 2
    return UT(j, u, u + prev.T + 1)


@dataclass(frozen=True)
class BoxPoint:
    """Point of the basic square by arc length ``t`` in ``[0, 8)``.

    ``t = 0`` is ``(-1, -1)``; the boundary is traversed through ``(-1, 1)``,
    ``(1, 1)`` and ``(1, -1)``.
    """

    t: Fraction

    def __post_init__(self):
        t = Fraction(self.t) % PERIMETER
        object.__setattr__(self, "t", t)

    @property
    def xy(self) -> Point:
        side, s = divmod(self.t, 2)
        side = int(side)
        if side == 0:
            return (Fraction(-1), -1 + s)
        if side == 1:
            return (-1 + s, Fraction(1))
        if side == 2:
            return (Fraction(1), 1 - s)
        return (1 - s, Fraction(-1))

    def opposite(self) -> "BoxPoint":
        return BoxPoint(self.t + 4)

    @classmethod
    def from_xy(cls, x, y) -> "BoxPoint":
        x, y = Fraction(x), Fraction(y)
        if x == -1 and -1 <= y <= 1 and y != 1:
            return cls(1 + y)
        if y == 1 and -1 <= x < 1:
            return cls(3 + x)
        if x == 1 and -1 < y <= 1:
            return cls(5 - y)
        if y == -1 and -1 < x <= 1:
            return cls(7 - x)
        raise ValueError(f"({x}, {y}) is not on the basic square")


def chi(p, eps) -> Fraction:
    """Scale profile: 1 near the top/right sides, eps near the left/bottom.

    Linear in arc length across the eps-neighbourhoods of the corners
    (-1, 1) and (1, -1).
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError("need 0 < eps < 1")
    if not isinstance(p, BoxPoint):
        p = BoxPoint.from_xy(*p)
    t = p.t
    if t <= 2 - eps or t >= 6 + eps:
        return eps
    if 2 + eps <= t <= 6 - eps:
        return Fraction(1)
    if t < 2 + eps:
        return eps + (1 - eps) * (t - (2 - eps)) / (2 * eps)
    return 1 - (1 - eps) * (t - (6 - eps)) / (2 * eps)


@dataclass(frozen=True)
class CycleTree:
    A: BoxPoint
    left: Optional["CycleTree"] = None
    right: Optional["CycleTree"] = None

    def __post_init__(self):
        if (self.left is None) != (self.right is None):
            raise ValueError("a node has either two children or none")
        if self.left is not None and self.left.depth != self.right.depth:
            raise ValueError("children must have equal depth")

    @property
    def depth(self) -> int:
        return 1 if self.left is None else 1 + self.left.depth

    def parameters(self) -> list[Fraction]:
        """Arc-length parameters in preorder; there are 2^depth - 1 of them."""
        if self.left is None:
            return [self.A.t]
        return [self.A.t] + self.left.parameters() + self.right.parameters()

    @classmethod
    def from_parameters(cls, depth: int, params) -> "CycleTree":
        it = iter(params)

        def build(d):
            A = BoxPoint(next(it))
            if d == 1:
                return cls(A)
            left = build(d - 1)
            return cls(A, left, build(d - 1))

        tree = build(depth)
        if next(it, None) is not None:
            raise ValueError("too many parameters")
        return tree

    def to_json(self):
        return {"depth": self.depth,
                "params": [f"{t.numerator}/{t.denominator}" for t in self.parameters()]}


def random_tree(depth: int, rng: random.Random, den: int = 1 << 16) -> CycleTree:
    params = [Fraction(rng.randrange(PERIMETER * den), den) for _ in range(2 ** depth - 1)]
    return CycleTree.from_parameters(depth, params)


@dataclass(frozen=True)
class Config2D:
    points: tuple
    squares: tuple = ()  # (center, half_side) of every participating square
    shift: Optional[tuple] = None
    depth: Optional[int] = None

    def __len__(self):
        return len(self.points)

    def to_json(self):
        def f(x):
            return f"{x.numerator}/{x.denominator}"

        out = {"points": [[f(x), f(y)] for x, y in self.points]}
        if self.shift is not None:
            out["shift"] = [f(self.shift[0]), f(self.shift[1])]
        return out


def _check_eps(eps) -> Fraction:
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps > MAX_EPS:
        raise EpsTooLarge(f"eps = {eps} exceeds {MAX_EPS}")
    return eps


def _build(tree: CycleTree, eps: Fraction):
    A = tree.A.xy
    minus_A = (-A[0], -A[1])
    base = ((Fraction(0), Fraction(0)), Fraction(1))
    if tree.left is None:
        return [A, minus_A], [base]
    u = ut_sequence(tree.depth).u
    points, squares = [], [base]
    for centre, p, child in ((A, tree.A, tree.left), (minus_A, tree.A.opposite(), tree.right)):
        scale = eps * chi(p, eps) ** u
        pts, sqs = _build(child, eps)
        points += [(centre[0] + scale * x, centre[1] + scale * y) for x, y in pts]
        squares += [((centre[0] + scale * c[0], centre[1] + scale * c[1]), scale * h)
                    for c, h in sqs]
    return points, squares


def build_config(tree: CycleTree, eps) -> Config2D:
    eps = _check_eps(eps)
    points, squares = _build(tree, eps)
    return Config2D(tuple(points), tuple(squares), None, tree.depth)


def min_square_side(tree: CycleTree, eps) -> Fraction:
    eps = _check_eps(eps)
    side = 2 * min(h for _, h in build_config(tree, eps).squares)
    if tree.depth >= 2:
        bound = 2 * eps ** ut_sequence(tree.depth).T
        assert side >= bound, f"square side {side} below {bound}"
    return side


def within_radius(c: Config2D, eps) -> bool:
    """Every point lies within sqrt(2)/(1 - eps) of the origin (squared test)."""
    eps = Fraction(eps)
    bound = 2 / (1 - eps) ** 2
    return all(x * x + y * y <= bound for x, y in c.points)


def shift_config(c: Config2D, Z) -> Config2D:
    u, v = (Fraction(z) for z in Z)
    if v - u <= 8:
        raise ShiftTooSmall(f"need v - u > 8, got {v - u}")
    pts = tuple((x + u, y + v) for x, y in c.points)
    for a, b in pts:
        assert a < b, f"shifted point ({a}, {b}) left the half-plane"
    return Config2D(pts, tuple(((cx + u, cy + v), h) for (cx, cy), h in c.squares),
                    (u, v), c.depth)


def _segment_types(points, delta: Fraction):
    n = len(points)
    horiz = [[] for _ in range(n)]
    vert = [[] for _ in range(n)]
    for i in range(n):
        xi, yi = points[i]
        for k in range(i + 1, n):
            dx = abs(points[k][0] - xi)
            dy = abs(points[k][1] - yi)
            if dx > 0 and dy < delta * dx:
                horiz[i].append(k)
                horiz[k].append(i)
            elif dy > 0 and dx < delta * dy:
                vert[i].append(k)
                vert[k].append(i)
    return horiz, vert


def is_delta_resonant(c, delta) -> tuple[bool, Optional[list]]:
    """Search for a closed chain of alternating delta-horizontal and
    delta-vertical segments.

    States are (point, type of the segment just used); the next segment must
    have the other type, and a chain is a directed cycle of states.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("need 0 < delta < 1")
    points = c.points if isinstance(c, Config2D) else tuple(c)
    horiz, vert = _segment_types(points, delta)
    H, V = 0, 1

    def succ(state):
        i, last = state
        nbrs = vert[i] if last == H else horiz[i]
        return [(k, 1 - last) for k in nbrs]

    colour = {}
    for start in ((i, t) for i in range(len(points)) for t in (H, V)):
        if start in colour:
            continue
        colour[start] = 1
        stack = [(start, iter(succ(start)))]
        path = [start]
        while stack:
            state, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                colour[state] = 2
                stack.pop()
                path.pop()
                continue
            if colour.get(nxt) == 1:
                cycle = path[path.index(nxt):]
                return True, [points[i] for i, _ in cycle]
            if nxt not in colour:
                colour[nxt] = 1
                stack.append((nxt, iter(succ(nxt))))
                path.append(nxt)
    return False, None


def chain_is_valid(chain, delta) -> bool:
    """Check a witness: closed, even length, strictly alternating types."""
    delta = Fraction(delta)
    k = len(chain)
    if k < 4 or k % 2:
        return False
    kinds = []
    for i in range(k):
        (x0, y0), (x1, y1) = chain[i], chain[(i + 1) % k]
        dx, dy = abs(x1 - x0), abs(y1 - y0)
        if dx > 0 and dy < delta * dx:
            kinds.append("H")
        elif dy > 0 and dx < delta * dy:
            kinds.append("V")
        else:
            return False
    return all(kinds[i] != kinds[(i + 1) % k] for i in range(k))


def as_diagram(c: Config2D) -> ChordDiagram:
    return make_diagram(list(c.points))


def verify_square_sizes(j: int, eps, samples: int, seed: int) -> Report:
    t0 = time.perf_counter()
    eps = _check_eps(eps)
    rng = random.Random(seed)
    bound = 2 * eps ** ut_sequence(j).T if j >= 2 else Fraction(2)
    failures = []
    smallest = None
    for _ in range(samples):
        tree = random_tree(j, rng)
        side = 2 * min(h for _, h in build_config(tree, eps).squares)
        smallest = side if smallest is None else min(smallest, side)
        if side < bound:
            failures.append({"tree": tree.to_json(), "side": side})
    return Report.make("square_sizes", {"j": j, "eps": eps, "samples": samples, "seed": seed},
                       failures=failures, counts={"samples": samples},
                       verdicts={"bound": bound, "smallest_side": smallest}, started=t0)


def verify_mtool2(j: int, eps, samples: int, seed: int) -> Report:
    """Sampled trees must carry no eps^(u_j + 1)-resonant configuration."""
    t0 = time.perf_counter()
    if j < 2:
        raise ValueError("need j >= 2")
    eps = _check_eps(eps)
    delta = eps ** (ut_sequence(j).u + 1)
    rng = random.Random(seed)
    failures = []
    radius_bad = 0
    for _ in range(samples):
        tree = random_tree(j, rng)
        c = build_config(tree, eps)
        if len(set(c.points)) != len(c.points) or not within_radius(c, eps):
            radius_bad += 1
            failures.append({"tree": tree.to_json(), "reason": "geometry"})
            continue
        hit, chain = is_delta_resonant(c, delta)
        if hit:
            failures.append({"tree": tree.to_json(), "chain": [list(p) for p in chain]})
    return Report.make("verify_mtool2",
                       {"j": j, "eps": eps, "samples": samples, "seed": seed},
                       failures=failures, verdicts={"delta": delta},
                       counts={"samples": samples, "geometry_failures": radius_bad},
                       started=t0)


def verify_mtool(j: int, eps, Z, samples: int, seed: int) -> Report:
    """Shifted configurations, read as chord diagrams, must be non-resonant."""
    t0 = time.perf_counter()
    eps = _check_eps(eps)
    u, v = (Fraction(z) for z in Z)
    if v - u <= 8:
        raise ShiftTooSmall(f"need v - u > 8, got {v - u}")
    rng = random.Random(seed)
    failures = []
    below_diagonal = 0
    shared = 0
    for _ in range(samples):
        tree = random_tree(j, rng)
        c = build_config(tree, eps)
        try:
            s = shift_config(c, (u, v))
        except AssertionError:
            below_diagonal += 1
            failures.append({"tree": tree.to_json(), "reason": "a >= b"})
            continue
        lefts = {a for a, _ in s.points}
        rights = {b for _, b in s.points}
        if lefts & rights:
            shared += 1
            failures.append({"tree": tree.to_json(), "reason": "left equals right"})
        d = as_diagram(s)
        hit, witness = is_resonant(d)
        if hit:
            failures.append({"tree": tree.to_json(), "witness": witness.to_json()})
    return Report.make("verify_mtool",
                       {"j": j, "eps": eps, "shift": [u, v], "samples": samples, "seed": seed},
                       failures=failures,
                       counts={"samples": samples, "below_diagonal": below_diagonal,
                               "left_right_coincidences": shared},
                       started=t0)
