"""Chord diagrams: validation, resonance, free codimension, equivalence, flips.

A diagram is a finite set of chords ``{a, b}`` on the real line.  Its
endpoint graph has the distinct endpoint values as vertices and the chords as
edges; every question in this module is a question about that graph.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .rational import FLOAT_MERGE_TOL, Scalar, fmt_scalar, is_exact, to_scalar


class DiagramError(ValueError):
    pass


class DegenerateChord(DiagramError):
    pass


class DuplicateChord(DiagramError):
    pass


class ResonantInput(DiagramError):
    pass


@dataclass(frozen=True, order=True)
class Chord:
    a: Scalar
    b: Scalar

    def __post_init__(self):
        a, b = to_scalar(self.a), to_scalar(self.b)
        if a == b:
            raise DegenerateChord(f"chord with equal endpoints {a}")
        if b < a:
            a, b = b, a
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def exact(self) -> bool:
        return is_exact(self.a) and is_exact(self.b)

    def to_json(self):
        return [fmt_scalar(self.a), fmt_scalar(self.b)]

    def __repr__(self):
        return f"({self.a}, {self.b})"


class UnionFind:
    def __init__(self, items: Iterable = ()):
        self.parent = {}
        self.rank = {}
        for x in items:
            self.add(x)

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.rank[x] = 0

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        """Merge the classes of x and y; False if they were already merged."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1
        return True


def _endpoint_keys(values) -> dict:
    """Map every endpoint value to its vertex label.

    Exact values are their own labels.  As soon as a float is present,
    values within ``FLOAT_MERGE_TOL`` of their sorted neighbour share a label.
    """
    values = sorted(set(values))
    if all(is_exact(v) for v in values):
        return {v: v for v in values}
    keys = {}
    prev = None
    label = None
    for v in values:
        if prev is None or abs(float(v) - float(prev)) >= FLOAT_MERGE_TOL:
            label = v
        keys[v] = label
        prev = v
    return keys


@dataclass(frozen=True)
class ResonanceWitness:
    """A closed chain: ``joints[i]`` is shared by ``chords[i]`` and ``chords[i+1]``."""

    chords: tuple
    joints: tuple

    def is_valid(self) -> bool:
        k = len(self.chords)
        if k < 3 or len(set(self.chords)) != k or len(self.joints) != k:
            return False
        for i, p in enumerate(self.joints):
            c, e = self.chords[i], self.chords[(i + 1) % k]
            if p not in (c.a, c.b) or p not in (e.a, e.b):
                return False
        # consecutive joints are the two ends of the chord between them
        for i in range(k):
            c = self.chords[i]
            if {self.joints[i - 1], self.joints[i]} != {c.a, c.b}:
                return False
        return True

    def to_json(self):
        return {"chords": [c.to_json() for c in self.chords],
                "joints": [fmt_scalar(p) for p in self.joints]}


@dataclass(frozen=True)
class EndpointPartition:
    blocks: tuple  # tuple of sorted tuples, sorted by first element

    def to_json(self):
        return [[fmt_scalar(v) for v in block] for block in self.blocks]


@dataclass(frozen=True)
class ChordDiagram:
    chords: tuple

    @property
    def n(self) -> int:
        return len(self.chords)

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.chords)

    def endpoints(self) -> list:
        return sorted({p for c in self.chords for p in (c.a, c.b)})

    def pairs(self) -> list:
        return [(c.a, c.b) for c in self.chords]

    def to_json(self):
        return {"chords": [c.to_json() for c in self.chords]}

    @classmethod
    def from_json(cls, data) -> "ChordDiagram":
        return make_diagram([tuple(p) for p in data["chords"]])

    def __iter__(self):
        return iter(self.chords)

    def __len__(self):
        return len(self.chords)

    def __repr__(self):
        return "{" + ", ".join(map(repr, self.chords)) + "}"


def make_diagram(pairs) -> ChordDiagram:
    """Build a diagram from ``(a, b)`` pairs, normalizing each chord to ``a < b``."""
    chords = [p if isinstance(p, Chord) else Chord(*p) for p in pairs]
    keys = _endpoint_keys(p for c in chords for p in (c.a, c.b))
    seen = {}
    for c in chords:
        k = (keys[c.a], keys[c.b])
        if k in seen:
            raise DuplicateChord(f"chord {c} repeats {seen[k]}")
        seen[k] = c
    return ChordDiagram(tuple(sorted(chords)))


def _graph(d: ChordDiagram):
    keys = _endpoint_keys(d.endpoints())
    return keys, [(keys[c.a], keys[c.b]) for c in d.chords]


def is_resonant(d: ChordDiagram) -> tuple[bool, Optional[ResonanceWitness]]:
    keys, edges = _graph(d)
    uf = UnionFind(keys.values())
    forest = defaultdict(list)  # vertex -> [(neighbour, chord index)]
    for idx, (u, v) in enumerate(edges):
        if uf.union(u, v):
            forest[u].append((v, idx))
            forest[v].append((u, idx))
            continue
        # u and v already connected: the forest path plus this chord closes a cycle
        back = {u: None}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for y, j in forest[x]:
                if y not in back:
                    back[y] = (x, j)
                    queue.append(y)
        path_chords, joints = [], []
        x = v
        while back[x] is not None:
            prev, j = back[x]
            joints.append(x)
            path_chords.append(d.chords[j])
            x = prev
        # walk v -> ... -> u, then the closing chord u -> v
        chords = tuple(path_chords) + (d.chords[idx],)
        joints = tuple(joints[1:]) + (u, v)
        joints = _labels_to_values(d, chords, joints)
        return True, ResonanceWitness(chords, joints)
    return False, None


def _labels_to_values(d, chords, joints):
    # in float mode a label is one representative; report the chord's own value
    out = []
    for i, p in enumerate(joints):
        c = chords[i]
        out.append(min((c.a, c.b), key=lambda q: abs(float(q) - float(p))))
    return tuple(out)


def _components(d: ChordDiagram):
    keys, edges = _graph(d)
    uf = UnionFind(keys.values())
    for u, v in edges:
        uf.union(u, v)
    return keys, uf


def codimension_free(d: ChordDiagram) -> int:
    """#vertices - #components of the endpoint graph."""
    keys, uf = _components(d)
    vertices = set(keys.values())
    roots = {uf.find(v) for v in vertices}
    return len(vertices) - len(roots)


def betti_one(d: ChordDiagram) -> int:
    return d.n - codimension_free(d)


def canonical_partition(d: ChordDiagram) -> EndpointPartition:
    keys, uf = _components(d)
    blocks = defaultdict(list)
    for value, label in keys.items():
        blocks[uf.find(label)].append(value)
    parts = sorted(tuple(sorted(b)) for b in blocks.values() if len(b) >= 2)
    return EndpointPartition(tuple(parts))


def equivalent(d1: ChordDiagram, d2: ChordDiagram) -> bool:
    for d in (d1, d2):
        if is_resonant(d)[0]:
            raise ResonantInput(f"{d} is resonant")
    return canonical_partition(d1) == canonical_partition(d2)


def elementary_flips(d: ChordDiagram, grid) -> set:
    """Diagrams reachable by moving one end of one chord inside its block."""
    if is_resonant(d)[0]:
        raise ResonantInput(f"{d} is resonant")
    grid = {to_scalar(g) for g in grid}
    missing = [p for p in d.endpoints() if p not in grid]
    if missing:
        raise DiagramError(f"endpoints {missing} not in grid")
    part = canonical_partition(d)
    block_of = {p: block for block in part.blocks for p in block}
    present = set(d.chords)
    out = set()
    for c in d.chords:
        rest = [e for e in d.chords if e != c]
        for keep, drop in ((c.a, c.b), (c.b, c.a)):
            for z in block_of[keep]:
                if z in (keep, drop) or z not in grid:
                    continue
                new = Chord(keep, z)
                if new in present:
                    continue
                cand = ChordDiagram(tuple(sorted(rest + [new])))
                if is_resonant(cand)[0] or canonical_partition(cand) != part:
                    continue
                out.add(cand)
    return out


def flip_closure(d: ChordDiagram, grid) -> set:
    """Breadth-first closure of ``{d}`` under elementary flips."""
    seen = {d}
    queue = deque([d])
    while queue:
        cur = queue.popleft()
        for nxt in elementary_flips(cur, grid):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def all_diagrams(grid, n: int):
    """Every n-chord diagram with endpoints in ``grid`` (no resonance filter)."""
    from itertools import combinations

    pts = sorted(to_scalar(g) for g in grid)
    chords = [Chord(a, b) for a, b in combinations(pts, 2)]
    for combo in combinations(chords, n):
        yield ChordDiagram(tuple(sorted(combo)))


def as_fraction_pairs(d: ChordDiagram):
    return [(Fraction(c.a), Fraction(c.b)) for c in d.chords]
