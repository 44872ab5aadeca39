"""Search for non-resonant diagrams whose codimension drops, and certify them.

The search minimizes the r-th smallest singular value of the row-normalized
evaluation matrix.  A float minimum is only a candidate: it is rounded to
rationals and accepted once exact elimination confirms the rank drop.

Strategies
----------
``symmetric-seed``
    Chords ``(c - t_i, c + t_i)`` sharing a centre ``c``.  Exact checks of
    the seeds ``{(-i, i)}`` come first, then Nelder-Mead restarts over
    ``(c, t_1..t_n)``.  Rounding the parameters keeps the symmetry exact,
    which is what makes certificates reachable for spaces with a
    reflection symmetry.
``multistart-simplex``
    Nelder-Mead restarts over all 2n endpoints.  When the degenerate set is
    locally a hypersurface with a rational normal, the rounded point is
    projected onto it exactly before the re-check.
``random``
    Random rational diagrams on the sampling grid, checked exactly.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .diagram import (ChordDiagram, DiagramError, is_resonant, make_diagram,
                      codimension_free)
from .expr import EvaluationDomainError, compile_numpy
from .funcspace import (EXACT, Basis, codimension_in, eval_matrix, random_rational)
from .linalg import exact_rank
from .rational import simplest_within
from .report import Report

STRATEGIES = ("multistart-simplex", "random", "symmetric-seed")
SENTINEL = float("inf")
PENALTY_WEIGHT = 1e4


class NotDegenerate(ValueError):
    pass


class WrongDimension(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    n: int
    r: int = 1
    strategy: str = "multistart-simplex"
    budget: int = 100_000
    tol: float = 1e-8
    max_den: int = 1 << 20
    box: float = 10.0
    margin: float = 1e-3
    restart_evals: int = 4000
    stop_on_certificate: bool = True

    def __post_init__(self):
        if not 1 <= self.r <= self.n:
            raise ValueError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class DegeneracyCertificate:
    diagram: ChordDiagram
    basis_name: str
    rank: int
    deficiency: int
    nonresonant: bool

    def replay(self, basis: Basis) -> bool:
        """Recompute everything from the stored rational diagram."""
        if not self.diagram.exact or basis.name != self.basis_name:
            return False
        rank = codimension_in(self.diagram, basis, EXACT)
        return (rank == self.rank and self.deficiency == self.diagram.n - rank
                and rank < self.diagram.n and not is_resonant(self.diagram)[0]
                and self.nonresonant)

    def valid_for(self, r: int) -> bool:
        return self.deficiency >= r

    def to_json(self):
        return {"diagram": self.diagram.to_json(), "basis": self.basis_name,
                "rank": self.rank, "deficiency": self.deficiency,
                "nonresonant": self.nonresonant}

    @classmethod
    def from_json(cls, data: dict) -> "DegeneracyCertificate":
        return cls(ChordDiagram.from_json(data["diagram"]), data["basis"],
                   int(data["rank"]), int(data["deficiency"]), bool(data["nonresonant"]))


@dataclass(frozen=True)
class Candidate:
    diagram: ChordDiagram
    sigma: float
    certificate: Optional[DegeneracyCertificate] = None

    def sort_key(self):
        return (self.sigma, [(float(c.a), float(c.b)) for c in self.diagram.chords])

    def to_json(self):
        out = {"diagram": self.diagram.to_json(), "sigma": self.sigma}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


@dataclass
class SearchResult:
    candidates: list = field(default_factory=list)
    evaluations: int = 0
    budget_exhausted: bool = False

    @property
    def certificates(self) -> list:
        return [c.certificate for c in self.candidates if c.certificate is not None]

    def best(self) -> Optional[Candidate]:
        return self.candidates[0] if self.candidates else None

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self):
        return len(self.candidates)


# -- objective ---------------------------------------------------------------

class _Evaluator:
    """Float evaluation of a basis on endpoint arrays."""

    def __init__(self, basis: Basis):
        self.basis = basis
        self.funcs = [compile_numpy(e) for e in basis.exprs]

    def matrix(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        pts = np.concatenate([a, b])
        with np.errstate(all="ignore"):
            vals = np.array([f(pts) for f in self.funcs])  # N x 2n
        m = len(a)
        out = (vals[:, m:] - vals[:, :m]).T
        if not np.all(np.isfinite(out)):
            raise EvaluationDomainError("basis not finite at these endpoints")
        return out


def _padded_singular_values(mat: np.ndarray, n: int) -> Optional[np.ndarray]:
    """Descending singular values of the row-normalized matrix, padded to n."""
    sup = np.max(np.abs(mat), axis=1) if mat.shape[1] else np.zeros(n)
    if np.any(sup < 1e-300):
        return None
    s = np.linalg.svd(mat / sup[:, None], compute_uv=False)
    if len(s) < n:
        s = np.concatenate([s, np.zeros(n - len(s))])
    return s


def sigma_values(d: ChordDiagram, basis: Basis) -> Optional[np.ndarray]:
    ev = _Evaluator(basis)
    a = np.array([float(c.a) for c in d.chords])
    b = np.array([float(c.b) for c in d.chords])
    return _padded_singular_values(ev.matrix(a, b), d.n)


def sigma_min(d: ChordDiagram, basis: Basis) -> float:
    """Smallest singular value of the row-sup-normalized evaluation matrix.

    A row that vanishes identically gives the sentinel ``inf``.
    """
    s = sigma_values(d, basis)
    return SENTINEL if s is None else float(s[-1])


def sigma_r(d: ChordDiagram, basis: Basis, r: int) -> float:
    s = sigma_values(d, basis)
    return SENTINEL if s is None else float(s[d.n - r])


class _Objective:
    def __init__(self, basis: Basis, cfg: SearchConfig, budget: int):
        self.ev = _Evaluator(basis)
        self.cfg = cfg
        self.remaining = budget
        self.calls = 0

    class Exhausted(Exception):
        pass

    def penalty(self, a, b) -> float:
        cfg = self.cfg
        p = np.sum(np.maximum(0.0, cfg.margin - (b - a)) ** 2)
        pts = np.concatenate([a, b])
        p += np.sum(np.maximum(0.0, np.abs(pts) - cfg.box) ** 2)
        # distinct endpoints keep the diagram away from resonance and duplicates
        gaps = np.abs(pts[:, None] - pts[None, :])[np.triu_indices(len(pts), 1)]
        p += np.sum(np.maximum(0.0, cfg.margin - gaps) ** 2)
        return float(p)

    def sigma(self, a, b) -> float:
        try:
            s = _padded_singular_values(self.ev.matrix(a, b), self.cfg.n)
        except EvaluationDomainError:
            return 1.0
        return 1.0 if s is None else float(s[self.cfg.n - self.cfg.r])

    def __call__(self, a, b) -> float:
        if self.remaining <= 0:
            raise self.Exhausted
        self.remaining -= 1
        self.calls += 1
        return self.sigma(a, b) + PENALTY_WEIGHT * self.penalty(a, b)


# -- rationalization and certification ---------------------------------------

_TOLERANCES = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9, 1e-10)


def _diagram_or_none(pairs) -> Optional[ChordDiagram]:
    try:
        d = make_diagram(pairs)
    except DiagramError:
        return None
    if is_resonant(d)[0]:
        return None
    return d


def certify(d: ChordDiagram, basis: Basis, r: int) -> Optional[DegeneracyCertificate]:
    """Exact certificate if ``d`` is rational, non-resonant and drops rank by r."""
    if not basis.exact or not d.exact or is_resonant(d)[0]:
        return None
    rank = exact_rank(eval_matrix(d, basis, EXACT).rows)
    if d.n - rank < r:
        return None
    return DegeneracyCertificate(d, basis.name, rank, d.n - rank,
                                 codimension_free(d) == d.n)


def _round_ladder(values, max_den):
    seen = set()
    for tol in _TOLERANCES:
        q = tuple(simplest_within(float(v), tol, max_den) for v in values)
        if q not in seen:
            seen.add(q)
            yield q


def minors(mat: np.ndarray, k: int) -> np.ndarray:
    n, N = mat.shape
    if k > min(n, N):
        return np.zeros(0)
    return np.array([np.linalg.det(mat[np.ix_(rows, cols)])
                     for rows in itertools.combinations(range(n), k)
                     for cols in itertools.combinations(range(N), k)])


def minors_gradient(coords: np.ndarray, basis: Basis, n: int, k: int,
                    step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of all k x k minors in the 2n endpoints.

    ``coords`` is ``[a_1, b_1, ..., a_n, b_n]``.
    """
    ev = _Evaluator(basis)

    def f(x):
        return minors(ev.matrix(x[0::2], x[1::2]), k)

    cols = []
    for i in range(len(coords)):
        e = np.zeros(len(coords))
        e[i] = step
        cols.append((f(coords + e) - f(coords - e)) / (2 * step))
    return np.array(cols).T


def _snap_to_hypersurface(x: np.ndarray, basis: Basis, cfg: SearchConfig):
    """Rational points on the tangent hyperplane, when the normal is rational."""
    try:
        G = minors_gradient(x, basis, cfg.n, cfg.n - cfg.r + 1)
    except EvaluationDomainError:
        return
    if G.size == 0:
        return
    _, s, vt = np.linalg.svd(G)
    if s[0] == 0 or (len(s) > 1 and s[1] > 1e-6 * s[0]):
        return
    g = vt[0]
    m = int(np.argmax(np.abs(g)))
    g = g / g[m]
    gq = [simplest_within(v, 1e-7, 10**6) for v in g]
    for xq in _round_ladder(x, cfg.max_den):
        h = simplest_within(float(np.dot(g, x)), 1e-9, cfg.max_den)
        xs = list(xq)
        xs[m] = h - sum(gq[i] * xs[i] for i in range(len(xs)) if i != m)
        yield xs


def _certify_coords(x: np.ndarray, basis: Basis, cfg: SearchConfig):
    if not basis.exact:
        return None
    tries = list(_round_ladder(x, cfg.max_den))
    tries += list(_snap_to_hypersurface(x, basis, cfg))
    for xs in tries:
        d = _diagram_or_none(list(zip(xs[0::2], xs[1::2])))
        if d is not None:
            cert = certify(d, basis, cfg.r)
            if cert is not None:
                return cert
    return None


def _certify_symmetric(p: np.ndarray, basis: Basis, cfg: SearchConfig):
    if not basis.exact:
        return None
    for q in _round_ladder(p, cfg.max_den):
        c, ts = q[0], q[1:]
        d = _diagram_or_none([(c - t, c + t) for t in ts])
        if d is not None:
            cert = certify(d, basis, cfg.r)
            if cert is not None:
                return cert
    return None


# -- strategies ----------------------------------------------------------------

def _float_diagram(a, b) -> Optional[ChordDiagram]:
    try:
        return make_diagram([(float(x), float(y)) for x, y in zip(a, b)])
    except DiagramError:
        return None


def _centre_scan(basis, cfg, rng, obj, out, n_spreads=3, grid=400) -> bool:
    """Look for a centre c about which every symmetric diagram degenerates.

    A single spread t has irrational zeros in c that rounding cannot reach;
    the maximum over several fixed rational spreads vanishes only where the
    degeneracy holds for all of them.
    """
    n = cfg.n
    spreads = []
    for _ in range(n_spreads):
        ts = sorted({Fraction(int(k), 8) for k in rng.integers(2, 24, n)})
        while len(ts) < n:
            ts = sorted(set(ts) | {ts[-1] + Fraction(1, 8)})
        spreads.append(ts)
    tf = [np.array([float(t) for t in ts]) for ts in spreads]
    lim = cfg.box - max(float(ts[-1]) for ts in spreads)

    def g(c):
        c = float(np.atleast_1d(c)[0])
        if abs(c) > lim:
            return 1.0 + abs(c) - lim
        worst = 0.0
        for t in tf:
            if obj.remaining <= 0:
                raise _Objective.Exhausted
            obj.remaining -= 1
            obj.calls += 1
            worst = max(worst, obj.sigma(c - t, c + t))
        return worst

    try:
        cs = np.linspace(-lim, lim, grid)
        vals = np.array([g(c) for c in cs])
        # the true valley can be narrow and shallow-looking on the grid, so
        # every local minimum is refined, not just the lowest values
        local = [i for i in range(grid)
                 if (i == 0 or vals[i] <= vals[i - 1])
                 and (i == grid - 1 or vals[i] <= vals[i + 1])]
        starts = sorted(local, key=lambda i: (vals[i], i))[:24]
        for i in starts:
            res = minimize(g, [cs[i]], method="Nelder-Mead",
                           options={"xatol": 1e-13, "fatol": 1e-16,
                                    "maxfev": min(400, max(obj.remaining, 1))})
            c = float(res.x[0])
            if res.fun >= max(cfg.tol, 1e-6) or not basis.exact:
                continue
            for (cq,) in _round_ladder([c], cfg.max_den):
                for ts in spreads:
                    d = _diagram_or_none([(cq - t, cq + t) for t in ts])
                    cert = certify(d, basis, cfg.r) if d is not None else None
                    if cert is not None:
                        out.append(Candidate(d, sigma_r(d, basis, cfg.r), cert))
                        return True
    except _Objective.Exhausted:
        pass
    return False


def _run_symmetric(basis, cfg, rng, obj, out):
    n = cfg.n
    # exact seeds first: {(c - i, c + i)}
    for c in (Fraction(0), Fraction(1), Fraction(-1)):
        obj.remaining -= 1
        obj.calls += 1
        d = make_diagram([(c - i, c + i) for i in range(1, n + 1)])
        try:
            sig = sigma_r(d, basis, cfg.r)
        except EvaluationDomainError:
            continue
        cert = certify(d, basis, cfg.r) if basis.exact else None
        out.append(Candidate(d, sig, cert))
        if cert is not None and cfg.stop_on_certificate:
            return
    if _centre_scan(basis, cfg, rng, obj, out) and cfg.stop_on_certificate:
        return
    half = cfg.box / 2

    def f(p):
        c, t = p[0], np.abs(p[1:])
        return obj(c - t, c + t)

    while obj.remaining > 0:
        p0 = np.concatenate([[rng.uniform(-half / 2, half / 2)],
                             np.sort(rng.uniform(0.2, half / 2, n))])
        try:
            res = minimize(f, p0, method="Nelder-Mead",
                           options={"maxfev": min(cfg.restart_evals, obj.remaining),
                                    "xatol": 1e-13, "fatol": 1e-15, "adaptive": True})
            p = res.x
        except _Objective.Exhausted:
            break
        p = np.concatenate([[p[0]], np.abs(p[1:])])
        c, t = p[0], p[1:]
        sig = obj.sigma(c - t, c + t)
        d = _float_diagram(c - t, c + t)
        if d is None or obj.penalty(c - t, c + t) > 0:
            continue
        cert = _certify_symmetric(p, basis, cfg) if sig < cfg.tol else None
        if cert is not None:
            out.append(Candidate(cert.diagram, sigma_r(cert.diagram, basis, cfg.r), cert))
            if cfg.stop_on_certificate:
                return
        else:
            out.append(Candidate(d, sig))


def _run_multistart(basis, cfg, rng, obj, out):
    n = cfg.n
    half = cfg.box / 2

    def f(x):
        return obj(x[0::2], x[1::2])

    while obj.remaining > 0:
        ends = rng.uniform(-half, half, (n, 2))
        ends.sort(axis=1)
        x0 = ends.reshape(-1)
        try:
            res = minimize(f, x0, method="Nelder-Mead",
                           options={"maxfev": min(cfg.restart_evals, obj.remaining),
                                    "xatol": 1e-13, "fatol": 1e-15, "adaptive": True})
        except _Objective.Exhausted:
            break
        x = res.x
        a, b = x[0::2], x[1::2]
        if obj.penalty(a, b) > 0:
            continue
        d = _float_diagram(a, b)
        if d is None:
            continue
        sig = obj.sigma(a, b)
        cert = _certify_coords(x, basis, cfg) if sig < cfg.tol else None
        if cert is not None:
            out.append(Candidate(cert.diagram, sigma_r(cert.diagram, basis, cfg.r), cert))
            if cfg.stop_on_certificate:
                return
        else:
            out.append(Candidate(d, sig))


def _run_random(basis, cfg, rng, obj, out):
    prng = random.Random(int(rng.integers(2**63)))
    best = None
    while obj.remaining > 0:
        obj.remaining -= 1
        obj.calls += 1
        pairs = []
        for _ in range(cfg.n):
            a = random_rational(prng)
            b = random_rational(prng)
            pairs.append((a, b))
        d = _diagram_or_none(pairs)
        if d is None:
            continue
        try:
            sig = sigma_r(d, basis, cfg.r)
        except EvaluationDomainError:
            continue
        cert = certify(d, basis, cfg.r) if basis.exact else None
        if cert is not None:
            out.append(Candidate(d, sig, cert))
            if cfg.stop_on_certificate:
                return
        elif best is None or sig < best.sigma:
            best = Candidate(d, sig)
    if best is not None:
        out.append(best)


_RUNNERS = {
    "symmetric-seed": _run_symmetric,
    "multistart-simplex": _run_multistart,
    "random": _run_random,
}


def search_degenerate(basis: Basis, cfg: SearchConfig, seed: int) -> SearchResult:
    rng = np.random.default_rng(seed)
    obj = _Objective(basis, cfg, cfg.budget)
    found: list[Candidate] = []
    _RUNNERS[cfg.strategy](basis, cfg, rng, obj, found)
    # merge duplicates, deterministic order
    uniq = {}
    for c in found:
        key = (c.diagram, c.certificate is not None)
        if key not in uniq or c.sigma < uniq[key].sigma:
            uniq[key] = c
    cands = sorted(uniq.values(), key=lambda c: (c.certificate is None,) + c.sort_key())
    certified = any(c.certificate is not None for c in cands)
    exhausted = obj.remaining <= 0 and not certified
    return SearchResult(cands, obj.calls, exhausted)


def exceptional_dimension_probe(d0: ChordDiagram, basis: Basis,
                                step: float = 1e-5, rank_tol: float = 1e-6) -> int:
    """Local dimension of the degenerate set at ``d0``.

    2n minus the numerical rank of the Jacobian of all n x n minors; singular
    values count when above ``rank_tol * max(1, sigma_max)``.
    """
    n = d0.n
    if basis.exact and d0.exact:
        rank = codimension_in(d0, basis, EXACT)
    else:
        rank = codimension_in(d0, basis, "float")
    if rank >= n:
        raise NotDegenerate(f"{d0} has full rank {rank} in {basis.name}")
    coords = np.array([float(v) for c in d0.chords for v in (c.a, c.b)])
    G = minors_gradient(coords, basis, n, n, step)
    if G.size == 0:
        return 2 * n
    s = np.linalg.svd(G, compute_uv=False)
    tau = rank_tol * max(1.0, float(s[0]))
    return 2 * n - int(np.sum(s > tau))


def explore_problem_n3(family, budget: int = 20_000, seed: int = 0) -> Report:
    """Look for degenerate 3-chord diagrams in 4-dimensional spaces.

    Never claims non-existence: the verdict is "found" or
    "none found within budget".
    """
    t0 = time.perf_counter()
    for basis in family:
        if basis.N != 4:
            raise WrongDimension(f"{basis.name} has dimension {basis.N}, expected 4")
    verdicts, witnesses = {}, []
    minima = {}
    for basis in family:
        best_sigma = SENTINEL
        cert = None
        for strategy in ("symmetric-seed", "multistart-simplex"):
            cfg = SearchConfig(n=3, r=1, strategy=strategy, budget=budget // 2)
            res = search_degenerate(basis, cfg, seed)
            for cand in res:
                best_sigma = min(best_sigma, cand.sigma)
            if res.certificates:
                cert = res.certificates[0]
                break
        verdicts[basis.name] = "found" if cert is not None else "none found within budget"
        minima[basis.name] = best_sigma
        if cert is not None:
            witnesses.append(cert.to_json())
    return Report.make("explore_problem_n3",
                       {"bases": [b.to_json() for b in family], "budget": budget,
                        "seed": seed},
                       verdicts={"per_basis": verdicts, "min_sigma": minima},
                       witnesses=witnesses, counts={"bases": len(family)}, started=t0)


def random_exact_basis(N: int, rng: random.Random, name: Optional[str] = None) -> Basis:
    """Random polynomial space of dimension N with a reflection symmetry.

    Picks a rational centre c and random integer combinations of odd and even
    powers of (x - c): ceil(N/2) odd and floor(N/2) even functions, with
    degrees running one step past those of PP^N so the span is a different
    space.
    """
    from .funcspace import parse_basis

    k_odd, k_even = (N + 1) // 2, N // 2
    while True:
        c = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        cs = f"({c.numerator}/{c.denominator})"
        odd_pows = [2 * i + 1 for i in range(k_odd + 1)]
        even_pows = [2 * i + 2 for i in range(k_even + 1)]
        rows, srcs = [], []
        for pows, count in ((odd_pows, k_odd), (even_pows, k_even)):
            for _ in range(count):
                coeffs = [rng.randint(-3, 3) for _ in pows]
                if not any(coeffs):
                    coeffs[0] = 1
                terms = [f"{a}*(x - {cs})^{p}" for a, p in zip(coeffs, pows) if a]
                srcs.append(" + ".join(terms))
                rows.append([coeffs[pows.index(p)] if p in pows else 0
                             for p in range(1, 2 * max(k_odd, k_even) + 3)])
        if exact_rank(rows) == N:
            basis = parse_basis(", ".join(srcs), name=name or f"sym{N}[c={c}]")
            return basis
