import random

import pytest

from chordlab import cohomology as coh
from chordlab.cohomology import (BudgetMismatch, CohClass, DPMonomial, SizeLimit,
                                 basis, basis_counts, betti_oracle, cup, dual_total_class,
                                 ones, square_check, sw_class, top_degree)
from chordlab.report import Cache
from oracles import class_mul, w_class, words


def C(n, d, *exps):
    return CohClass.from_monomials(n, d, [DPMonomial(e) for e in exps])


def as_words(c: CohClass):
    return {tuple(sorted(m.exps)) for m in c.monomials()}


@pytest.mark.parametrize("n,k", [(6, 2), (8, 1), (0, 0), (255, 8)])
def test_ones(n, k):
    assert ones(n) == k


def test_basis_examples():
    assert [str(m) for m in basis(4, 3)] == ["y2"]
    assert [str(m) for m in basis(6, 4)] == ["y1 y2"]
    assert basis(6, 5) == []


def test_monomial_weight_degree():
    m = DPMonomial(((1, 3), (2, 1)))
    assert m.weight == 3 * 2 + 4 and m.degree == 3 * 1 + 3
    with pytest.raises(ValueError):
        DPMonomial(((1, 0),))


@pytest.mark.parametrize("n,expected", [(2, [1, 1]), (3, [1, 1, 0]), (4, [1, 1, 1, 1])])
def test_betti_oracle_hand_values(n, expected):
    assert betti_oracle(n) == expected


def test_betti_oracle_matches_basis_counts():
    for n in range(1, 13):
        assert basis_counts(n) == betti_oracle(n)


def test_betti_oracle_size_limit():
    with pytest.raises(SizeLimit):
        betti_oracle(17)


def test_corrupted_cache_is_recomputed(tmp_path):
    cache = Cache(tmp_path)
    assert betti_oracle(7, cache) == basis_counts(7)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    files[0].write_text("{ not json")
    assert betti_oracle(7, cache) == basis_counts(7)
    cache.put("betti", {"n": 7}, [9, 9, 9])
    assert betti_oracle(7, cache) == basis_counts(7)
    assert cache.get("betti", {"n": 7}) == basis_counts(7)


def test_cup_examples():
    y1 = C(6, 1, ((1, 1),))
    c = C(6, 3, ((2, 1),), ((1, 3),))
    assert as_words(cup(y1, c)) == {((1, 1), (2, 1))}
    a = C(8, 2, ((1, 2),))
    b = C(8, 4, ((1, 1), (2, 1)), ((1, 4),))
    assert not cup(a, b)
    unit = CohClass.unit(8)
    assert cup(unit, b) == b and cup(b, unit) == b


def test_cup_budget_mismatch():
    with pytest.raises(BudgetMismatch):
        cup(CohClass.unit(4), CohClass.unit(5))


def test_cup_matches_tuple_oracle():
    rng = random.Random(4)
    for _ in range(300):
        n = rng.randint(2, 20)
        top = top_degree(n)
        d1, d2 = rng.randint(0, top), rng.randint(0, top)
        s1 = [w for w in words(n, d1) if rng.random() < 0.6]
        s2 = [w for w in words(n, d2) if rng.random() < 0.6]
        c1 = CohClass.from_monomials(n, d1, [DPMonomial(w) for w in s1])
        c2 = CohClass.from_monomials(n, d2, [DPMonomial(w) for w in s2])
        assert as_words(cup(c1, c2)) == class_mul(set(s1), set(s2), n)


def test_ring_axioms():
    rng = random.Random(9)
    for _ in range(200):
        n = rng.randint(2, 12)
        top = top_degree(n)
        cs = []
        for _ in range(3):
            d = rng.randint(0, top)
            ws = basis(n, d)
            cs.append(CohClass(n, d, [m.mask for m in ws if rng.random() < 0.5]))
        a, b, c = cs
        assert cup(a, b) == cup(b, a)
        assert cup(cup(a, b), c) == cup(a, cup(b, c))
        if a.degree == b.degree:
            assert cup(a + b, c) == cup(a, c) + cup(b, c)


def test_squares_vanish_on_monomials():
    for n in range(1, 11):
        for d in range(1, top_degree(n) + 1):
            for m in basis(n, d):
                c = CohClass(n, d, [m.mask])
                assert not cup(c, c)


@pytest.mark.parametrize("n", [6, 12])
def test_square_check(n):
    rep = square_check(n, 100, seed=n)
    assert rep.ok and rep.counts["sampled"] == 100


def test_square_check_skips_unit_only_ring():
    assert square_check(1, 50, seed=0).counts["sampled"] == 0


def test_sw_examples():
    assert as_words(sw_class(6, 1)) == {((1, 1),)}
    assert as_words(sw_class(6, 3)) == {((2, 1),), ((1, 3),)}
    assert not sw_class(6, 5)
    assert not sw_class(6, -1)


def test_sw_matches_oracle_and_support():
    for n in range(1, 33):
        assert top_degree(n) == n - ones(n)
        for d in range(n + 1):
            assert as_words(sw_class(n, d)) == w_class(n, d)
            assert bool(sw_class(n, d)) == (d <= n - ones(n))


def test_dual_class():
    for n in (1, 2, 6, 17):
        inv = dual_total_class(n)
        for d, c in enumerate(inv):
            assert c == (CohClass.unit(n) if d == 0 else sw_class(n, d))
    assert len(dual_total_class(1)) == 1
    assert as_words(dual_total_class(2)[1]) == {((1, 1),)}


def test_json_round_trip():
    c = sw_class(12, 5)
    assert CohClass.from_json(c.to_json()) == c


def test_coboundary_squares_to_zero():
    for n in range(2, 10):
        for cuts in range(1 << (n - 1)):
            twice = set()
            for mid in coh.coboundary(n, cuts):
                for end in coh.coboundary(n, mid):
                    twice ^= {end}
            assert twice == set()
