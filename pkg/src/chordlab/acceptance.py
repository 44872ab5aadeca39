"""The acceptance checks, one function per criterion.

Every check returns a Report whose ``failures`` list is empty exactly when
the criterion holds.  ``profile="full"`` uses the stated sizes; ``"quick"``
shrinks bounds and sample counts so the whole set runs in about a minute.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import cohomology as coh
from . import cycles
from .diagram import all_diagrams, canonical_partition, flip_closure, is_resonant
from .funcspace import polynomial_space, verify_prop1
from .porteous import antidiagonal_product, degeneracy_decision, porteous_det
from .report import Report
from .search import (SearchConfig, exceptional_dimension_probe, random_exact_basis,
                     search_degenerate)

PROFILES = ("quick", "full")
EPS = Fraction(1, 10)

# r -> {N - n: threshold n0}: decision true for n >= n0 and false at n0 - 1
THRESHOLDS = {
    2: {0: 6, 1: 10, 3: 14, 4: 16, 5: 18, 6: 26},
    3: {1: 18, 2: 22, 3: 26, 4: 34},
    4: {1: 30},
}


def _check_profile(profile: str) -> bool:
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}")
    return profile == "full"


def c01_sw_support(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    n_max = 64 if full else 10
    failures = []
    for n in range(1, n_max + 1):
        for d in range(n + 1):
            if bool(coh.sw_class(n, d)) != (d <= n - coh.ones(n)):
                failures.append({"n": n, "d": d})
    return Report.make("c01_sw_support", {"n_max": n_max}, failures=failures,
                       started=t0)


def c02_betti_oracle(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    n_max = 14 if full else 10
    failures = []
    for n in range(1, n_max + 1):
        got, want = coh.basis_counts(n), coh.betti_oracle(n)
        if got != want:
            failures.append({"n": n, "basis_counts": got, "oracle": want})
    return Report.make("c02_betti_oracle", {"n_max": n_max}, failures=failures,
                       started=t0)


def c03_squares(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    exhaustive_max, sampled_max = (10, 24) if full else (8, 12)
    trials = 1000 if full else 100
    failures = []
    for n in range(1, exhaustive_max + 1):
        for d in range(1, coh.top_degree(n) + 1):
            for m in coh.basis(n, d):
                c = coh.CohClass.from_monomials(n, d, [m])
                if coh.cup(c, c):
                    failures.append({"n": n, "monomial": str(m)})
    for n in range(1, sampled_max + 1):
        rep = coh.square_check(n, trials, seed=n)
        failures += [dict(f, n=n) for f in rep.failures]
        inv, w = coh.dual_total_class(n), coh.total_sw(n)
        for d, (a, b) in enumerate(zip(inv, w)):
            if a != b:
                failures.append({"n": n, "dual_degree": d})
    return Report.make("c03_squares", {"exhaustive_n_max": exhaustive_max,
                                       "sampled_n_max": sampled_max, "trials": trials},
                       failures=failures, started=t0)


def c04_determinant(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    n_max = 24 if full else 12
    failures = []
    cases = 0
    for n in range(1, n_max + 1):
        for q in range(9):
            for r in range(1, 5):
                cases += 1
                if porteous_det(n, n + q, r) != antidiagonal_product(n, n + q, r):
                    failures.append({"n": n, "N": n + q, "r": r})
    return Report.make("c04_determinant", {"n_max": n_max}, failures=failures,
                       counts={"cases": cases}, started=t0)


def threshold_checks(n_max: int):
    """(r, offset, n, expected) for both halves of the threshold criterion."""
    sufficiency, sharpness = [], []
    for r, rows in THRESHOLDS.items():
        for q, n0 in rows.items():
            sufficiency += [(r, q, n, True) for n in range(n0, n_max + 1)]
            if n0 - 1 <= n_max:
                sharpness.append((r, q, n0 - 1, False))
    return sufficiency, sharpness


def _threshold_report(task, checks, n_max, t0) -> Report:
    failures = [{"r": r, "offset": q, "n": n, "expected": want}
                for r, q, n, want in checks
                if degeneracy_decision(n, n + q, r) != want]
    return Report.make(task, {"n_max": n_max}, failures=failures,
                       counts={"checks": len(checks)}, started=t0)


def c05_thresholds_sufficiency(profile="full") -> Report:
    n_max = 40 if _check_profile(profile) else 10
    return _threshold_report("c05_thresholds_sufficiency", threshold_checks(n_max)[0],
                             n_max, time.perf_counter())


def c05_thresholds_sharpness(profile="full") -> Report:
    n_max = 40 if _check_profile(profile) else 10
    return _threshold_report("c05_thresholds_sharpness", threshold_checks(n_max)[1],
                             n_max, time.perf_counter())


def c05_thresholds(profile="full") -> Report:
    t0 = time.perf_counter()
    n_max = 40 if _check_profile(profile) else 10
    suff, sharp = threshold_checks(n_max)
    return _threshold_report("c05_thresholds", suff + sharp, n_max, t0)


def c06_rank_one(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    n_max = 64 if full else 16
    failures = []
    for n in range(1, n_max + 1):
        # the determinant test needs N >= n
        for N in range(n, 2 * n + 1):
            if degeneracy_decision(n, N, 1) != (N < 2 * n - coh.ones(n)):
                failures.append({"n": n, "N": N})
    return Report.make("c06_rank_one", {"n_max": n_max}, failures=failures, started=t0)


def c07_prop1(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    trials = 1000 if full else 100
    failures, counts = [], {}
    for n, N in ((2, 3), (3, 5), (4, 7)):
        rep = verify_prop1(n, N, trials, seed=1000 * n + N)
        failures += [dict(f, n=n, N=N) for f in rep.failures]
        counts[f"n{n}_N{N}"] = trials
    return Report.make("c07_prop1", {"trials": trials}, failures=failures,
                       counts=counts, started=t0)


SEARCH_CASES = ((2, 2), (3, 3), (3, 4), (4, 6))


def c08_desk_search(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    extra = 3 if full else 1
    failures, witnesses = [], []
    for n, N in SEARCH_CASES:
        bases = [polynomial_space(N)]
        rng = random.Random(7919 * n + N)
        bases += [random_exact_basis(N, rng) for _ in range(extra)]
        for basis in bases:
            cfg = SearchConfig(n=n, r=1, strategy="symmetric-seed", budget=100_000)
            res = search_degenerate(basis, cfg, seed=n + N)
            certs = [c for c in res.certificates if c.replay(basis)]
            if not certs:
                failures.append({"n": n, "N": N, "basis": basis.to_json(),
                                 "evaluations": res.evaluations})
            else:
                witnesses.append(certs[0].to_json())
    return Report.make("c08_desk_search", {"extra_bases": extra}, failures=failures,
                       witnesses=witnesses, started=t0)


def c09_rank_two(profile="full") -> Report:
    _check_profile(profile)
    t0 = time.perf_counter()
    basis = polynomial_space(6)
    res = search_degenerate(basis, SearchConfig(n=6, r=2, strategy="symmetric-seed",
                                                budget=100_000), seed=0)
    certs = [c for c in res.certificates if c.replay(basis) and c.rank <= 4]
    failures = [] if certs else [{"reason": "no certificate"}]
    return Report.make("c09_rank_two", {"n": 6, "N": 6, "r": 2}, failures=failures,
                       witnesses=[c.to_json() for c in certs[:1]],
                       counts={"evaluations": res.evaluations}, started=t0)


def c10_probe(profile="full") -> Report:
    _check_profile(profile)
    t0 = time.perf_counter()
    failures, verdicts = [], {}
    for n, N, ok in ((2, 2, lambda v: v == 3), (3, 3, lambda v: v >= 5)):
        basis = polynomial_space(N)
        res = search_degenerate(basis, SearchConfig(n=n, strategy="symmetric-seed",
                                                    budget=20_000), seed=1)
        if not res.certificates:
            failures.append({"n": n, "N": N, "reason": "no certified point"})
            continue
        dim = exceptional_dimension_probe(res.certificates[0].diagram, basis)
        verdicts[f"n{n}_N{N}"] = dim
        if not ok(dim):
            failures.append({"n": n, "N": N, "probe": dim, "bound": 3 * n - N - 1})
    return Report.make("c10_probe", {}, failures=failures, verdicts=verdicts,
                       started=t0)


def _merge(task, reports, params, t0) -> Report:
    failures, counts = [], {}
    for rep in reports:
        failures += [dict(f, source=rep.task, j=rep.params.get("j")) for f in rep.failures]
        counts[f"{rep.task}_j{rep.params['j']}"] = rep.params["samples"]
    return Report.make(task, params, failures=failures, counts=counts, started=t0)


def c11_square_sizes(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    plan = ((2, 10**4), (3, 10**4), (4, 10**2)) if full else ((2, 500), (3, 200), (4, 10))
    reps = [cycles.verify_square_sizes(j, EPS, k, seed=j) for j, k in plan]
    return _merge("c11_square_sizes", reps, {"plan": plan}, t0)


def c12_mtool2(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    plan = ((2, 10**4), (3, 10**4), (4, 10**2)) if full else ((2, 300), (3, 100), (4, 5))
    reps = [cycles.verify_mtool2(j, EPS, k, seed=j) for j, k in plan]
    return _merge("c12_mtool2", reps, {"plan": plan}, t0)


def c13_mtool(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    k = 10**3 if full else 100
    reps = [cycles.verify_mtool(j, EPS, (0, 9), k, seed=j) for j in (2, 3)]
    return _merge("c13_mtool", reps, {"samples": k, "shift": [0, 9]}, t0)


def c14_flips(profile="full") -> Report:
    full = _check_profile(profile)
    t0 = time.perf_counter()
    grid = list(range(6)) if full else list(range(5))
    failures, classes = [], 0
    for n in range(1, 4):
        by_partition = {}
        for d in all_diagrams(grid, n):
            if not is_resonant(d)[0]:
                by_partition.setdefault(canonical_partition(d), set()).add(d)
        for part, members in by_partition.items():
            classes += 1
            d0 = min(members, key=lambda d: d.chords)
            if flip_closure(d0, grid) != members:
                failures.append({"n": n, "partition": part.to_json()})
    return Report.make("c14_flips", {"grid": grid}, failures=failures,
                       counts={"classes": classes}, started=t0)


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    check: Callable[..., Report]


CRITERIA = (
    Criterion(1, "Stiefel-Whitney support", c01_sw_support),
    Criterion(2, "additive oracle equivalence", c02_betti_oracle),
    Criterion(3, "squares vanish, dual class", c03_squares),
    Criterion(4, "determinant identity", c04_determinant),
    Criterion(5, "codimension-drop thresholds", c05_thresholds),
    Criterion(6, "rank-one decision", c06_rank_one),
    Criterion(7, "independence for N >= 2n-1", c07_prop1),
    Criterion(8, "desk search certificates", c08_desk_search),
    Criterion(9, "rank two drop for n = N = 6", c09_rank_two),
    Criterion(10, "exceptional-set dimension probe", c10_probe),
    Criterion(11, "square sizes", c11_square_sizes),
    Criterion(12, "no delta-resonant configurations", c12_mtool2),
    Criterion(13, "shifted configurations non-resonant", c13_mtool),
    Criterion(14, "flip closure equals partition classes", c14_flips),
)


def verify_all(profile: str = "quick", progress=None) -> Report:
    _check_profile(profile)
    t0 = time.perf_counter()
    verdicts, failures = {}, []
    for crit in CRITERIA:
        rep = crit.check(profile)
        verdicts[str(crit.number)] = "pass" if rep.ok else "fail"
        failures += [{"criterion": crit.number, "detail": f} for f in rep.failures]
        if progress is not None:
            progress(crit, rep)
    return Report.make("verify_all", {"profile": profile}, failures=failures,
                       verdicts=verdicts, counts={"criteria": len(CRITERIA)},
                       started=t0)
