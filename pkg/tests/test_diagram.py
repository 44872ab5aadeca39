from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chordlab.diagram import (Chord, DegenerateChord, DuplicateChord, ResonantInput,
                              all_diagrams, betti_one, canonical_partition,
                              codimension_free, elementary_flips, equivalent,
                              flip_closure, is_resonant, make_diagram)
from oracles import blocks, has_cycle


def D(*pairs):
    return make_diagram(list(pairs))


def test_normalization():
    d = D((2, 1), (1, 3))
    assert d.pairs() == [(1, 2), (1, 3)]


def test_degenerate_and_duplicate():
    with pytest.raises(DegenerateChord):
        D((1, 1))
    with pytest.raises(DuplicateChord):
        D((1, 2), (2, 1))


def test_float_duplicate_within_merge_tolerance():
    with pytest.raises(DuplicateChord):
        D((0.1 + 0.2, 1.0), (0.3, 1.0))


def test_exactness_flag():
    assert D((Fraction(1, 3), 2)).exact
    assert not D((0.5, 2)).exact
    assert Chord("1/3", "2").exact


@pytest.mark.parametrize("pairs,resonant", [
    ([(1, 2), (2, 3), (1, 3)], True),
    ([(1, 2), (2, 3), (3, 4)], False),
    ([(1, 2), (3, 4), (5, 6)], False),
    ([(0, 1), (1, 2), (2, 3), (3, 0)], True),
])
def test_resonance_examples(pairs, resonant):
    hit, witness = is_resonant(D(*pairs))
    assert hit is resonant
    if hit:
        assert witness.is_valid()
        assert len(witness.chords) >= 3
    else:
        assert witness is None


def test_triangle_witness_is_the_triangle():
    _, w = is_resonant(D((1, 2), (2, 3), (1, 3)))
    assert set(w.chords) == {Chord(1, 2), Chord(2, 3), Chord(1, 3)}


@pytest.mark.parametrize("pairs,codim", [
    ([(1, 2), (2, 3), (3, 4)], 3),
    ([(1, 2), (2, 3), (1, 3)], 2),
    ([(1, 2)], 1),
    ([], 0),
])
def test_codimension_free(pairs, codim):
    d = D(*pairs)
    assert codimension_free(d) == codim
    assert betti_one(d) == d.n - codim


def test_partitions():
    assert canonical_partition(D((0, 1), (1, 2))).blocks == ((0, 1, 2),)
    assert canonical_partition(D((0, 1), (2, 3))).blocks == ((0, 1), (2, 3))
    assert canonical_partition(D((0, 1), (0, 2), (1, 2))).blocks == ((0, 1, 2),)


def test_flip_example():
    flips = elementary_flips(D((0, 1), (1, 2)), [0, 1, 2])
    assert flips == {D((0, 1), (0, 2)), D((0, 2), (1, 2))}
    assert elementary_flips(D((0, 1)), [0, 1]) == set()


def test_flips_preserve_partition_and_reject_resonant():
    d = D((0, 3), (1, 3), (2, 4))
    part = canonical_partition(d)
    for e in elementary_flips(d, range(6)):
        assert canonical_partition(e) == part
        assert not is_resonant(e)[0]
    with pytest.raises(ResonantInput):
        elementary_flips(D((0, 1), (1, 2), (0, 2)), range(3))
    with pytest.raises(ResonantInput):
        equivalent(D((0, 1), (1, 2), (0, 2)), D((0, 1)))


def test_equivalent():
    assert equivalent(D((0, 1), (1, 2)), D((0, 2), (1, 2)))
    assert not equivalent(D((0, 1), (1, 2)), D((0, 1), (2, 3)))


def test_flip_closure_matches_partition_classes_small_grid():
    grid = range(5)
    for n in (1, 2, 3):
        classes = {}
        for d in all_diagrams(grid, n):
            if not is_resonant(d)[0]:
                classes.setdefault(canonical_partition(d), set()).add(d)
        for members in classes.values():
            d0 = next(iter(members))
            assert flip_closure(d0, grid) == members


def test_partition_classes_agree_with_oracle_blocks():
    from oracles import forests

    grid = range(5)
    for n in (2, 3):
        ours = {}
        for d in all_diagrams(grid, n):
            if not is_resonant(d)[0]:
                ours.setdefault(canonical_partition(d), set()).add(frozenset(d.pairs()))
        theirs = {}
        for combo in forests(grid, n):
            theirs.setdefault(blocks(combo), set()).add(
                frozenset((Fraction(a), Fraction(b)) for a, b in combo))
        assert sorted(map(sorted, ours.values())) == sorted(map(sorted, theirs.values()))


pairs_strategy = st.lists(
    st.tuples(st.integers(0, 7), st.integers(0, 7)).filter(lambda p: p[0] != p[1]),
    min_size=0, max_size=7,
).map(lambda ps: list({tuple(sorted(p)) for p in ps}))


@settings(max_examples=300, deadline=None)
@given(pairs_strategy)
def test_resonance_matches_dfs_oracle(pairs):
    d = D(*pairs)
    hit, w = is_resonant(d)
    assert hit == has_cycle(pairs)
    if hit:
        assert w.is_valid()


@settings(max_examples=200, deadline=None)
@given(pairs_strategy)
def test_codimension_is_vertices_minus_components(pairs):
    d = D(*pairs)
    k = len(blocks(pairs)) if pairs else 0
    assert codimension_free(d) == len(d.endpoints()) - k
    assert (codimension_free(d) == d.n) == (not has_cycle(pairs))


def test_json_round_trip():
    d = D((Fraction(-1, 3), 2), (0, 5))
    assert type(d).from_json(d.to_json()) == d
    assert d.to_json() == {"chords": [["-1/3", "2/1"], ["0/1", "5/1"]]}
