# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Tests for parsing, loops, gaps and uniform sampling of secondary structures"""

import pickle
import unittest
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from loophom import error
from loophom.structures import (
    Arc,
    BiSecondaryStructure,
    Gap,
    Loop,
    SamplerConfig,
    arc_poset,
    count_structures,
    loop_gaps,
    loops,
    make_rng,
    parse_dot_bracket,
    randbelow,
    sample_pair,
    sample_uniform,
    validate_arcs,
)

from .testdata import STRUCTURES_N4, TEST_SEEDS


def enumerate_structures(n: int, min_gap: int = 0):
    """every dot-bracket string on n positions, by first-position decomposition"""
    if n == 0:
        yield ""
        return
    for rest in enumerate_structures(n - 1, min_gap):
        yield "." + rest
    for k in range(min_gap + 2, n + 1):
        for inner in enumerate_structures(k - 2, min_gap):
            for rest in enumerate_structures(n - k, min_gap):
                yield "(" + inner + ")" + rest


# fmt: off
@pytest.mark.parametrize("line, arcs", [
    ("", ()),
    ("....", ()),
    ("(.).", ((1, 3),)),
    ("((..))()", ((1, 6), (2, 5), (7, 8))),
    ("(((...)))", ((1, 9), (2, 8), (3, 7))),
])
# fmt: on
def test_parse_dot_bracket(line, arcs):
    """arcs come out 1-based and sorted by start"""
    structure = parse_dot_bracket(line)
    assert structure.n == len(line)
    assert tuple((arc.start, arc.end) for arc in structure.arcs) == arcs
    assert structure.to_dot_bracket() == line


# fmt: off
@pytest.mark.parametrize("line, exc, column", [
    ("(()", error.UnbalancedBrackets, 1),
    ("(().", error.UnbalancedBrackets, 1),
    ("())", error.UnbalancedBrackets, 3),
    (")(", error.UnbalancedBrackets, 1),
    ("(.x)", error.InvalidCharacter, 3),
    ("[..]", error.InvalidCharacter, 1),
])
# fmt: on
def test_parse_errors(line, exc, column):
    """malformed input reports its position"""
    with pytest.raises(exc) as info:
        parse_dot_bracket(line, line_number=2)
    assert info.value.line == 2
    assert info.value.column == column
    assert isinstance(info.value, error.LoopHomParseError)


def test_rainbow_is_implicit():
    structure = parse_dot_bracket("(..)")
    assert structure.rainbow == Arc(0, 5)
    assert structure.all_arcs == (Arc(0, 5), Arc(1, 4))
    assert structure.partners == (5, 4, -1, -1, 1, 0)


class TestValidateArcs(unittest.TestCase):
    """arc-list input"""

    def test_valid(self):
        structure = validate_arcs(6, [(2, 5), (1, 6)])
        self.assertEqual(structure.arcs, (Arc(1, 6), Arc(2, 5)))
        self.assertEqual(structure.to_dot_bracket(), "((..))")

    def test_crossing_reports_pair(self):
        with self.assertRaises(error.CrossingArcs) as cm:
            validate_arcs(4, [(1, 3), (2, 4)])
        self.assertEqual({cm.exception.first, cm.exception.second}, {(1, 3), (2, 4)})

    def test_duplicate_endpoint(self):
        with self.assertRaises(error.DuplicateEndpoint):
            validate_arcs(5, [(1, 3), (3, 5)])
        with self.assertRaises(error.DuplicateEndpoint):
            validate_arcs(2, [(1, 2), (1, 2)])

    def test_out_of_range(self):
        for arcs in ([(0, 3)], [(2, 7)], [(3, 2)], [(2, 2)]):
            with self.assertRaises(error.OutOfRange):
                validate_arcs(6, arcs)

    def test_negative_length(self):
        with self.assertRaises(error.OutOfRange):
            validate_arcs(-1, [])

    def test_errors_pickle(self):
        """errors cross process boundaries intact"""
        err = error.CrossingArcs((1, 3), (2, 4), line=1, column=1)
        copy = pickle.loads(pickle.dumps(err))
        self.assertEqual((copy.first, copy.second, copy.line), ((1, 3), (2, 4), 1))
        self.assertEqual(str(copy), str(err))


def test_length_mismatch():
    with pytest.raises(error.LengthMismatch) as info:
        BiSecondaryStructure.from_dot_bracket("(.).", "(.)")
    assert info.value.line == 2


def test_arc_poset():
    """the Hasse diagram points every arc to its least enclosure"""
    structure = validate_arcs(21, [(4, 19), (5, 11), (14, 18)])
    poset = arc_poset(structure)
    assert poset.root == Arc(0, 22)
    assert poset.parent(Arc(4, 19)) == Arc(0, 22)
    assert poset.parent(Arc(5, 11)) == Arc(4, 19)
    assert poset.parent(Arc(14, 18)) == Arc(4, 19)
    assert poset.parent(poset.root) is None
    assert poset.children(Arc(4, 19)) == (Arc(5, 11), Arc(14, 18))
    assert poset.precedes(Arc(5, 11), Arc(4, 19))
    assert not poset.precedes(Arc(5, 11), Arc(14, 18))


# fmt: off
@pytest.mark.parametrize("n, arcs, expected", [
    (4, [], [((0, 5),)]),
    (4, [(1, 3)], [((0, 1), (3, 5)), ((1, 3),)]),
    (4, [(1, 4), (2, 3)], [((0, 1), (4, 5)), ((1, 2), (3, 4)), ((2, 3),)]),
    (21, [(4, 19), (5, 11), (14, 18)], [((0, 4), (19, 22)), ((4, 5), (11, 14), (18, 19)), ((5, 11),), ((14, 18),)]),
])
# fmt: on
def test_loops(n, arcs, expected):
    """rainbow loop first, then by start of the maximal arc"""
    found = loops(validate_arcs(n, arcs))
    assert [lp.intervals for lp in found] == expected
    assert [lp.max_arc for lp in found] == list(validate_arcs(n, arcs).all_arcs)


def test_loop_gaps():
    lp = Loop(((4, 5), (11, 14), (18, 19)), Arc(4, 19))
    gaps = loop_gaps(lp, 21)
    assert [gap.interval for gap in gaps] == [(0, 4), (5, 11), (14, 18), (19, 22)]
    assert [gap.kind for gap in gaps] == [Gap.EXTERIOR, Gap.INTERIOR, Gap.INTERIOR, Gap.EXTERIOR]
    assert lp.size == 8
    assert 12 in lp and 15 not in lp


def test_single_block_gaps():
    """a hairpin loop has only the two exterior gaps"""
    lp = loops(validate_arcs(4, [(1, 3)]))[1]
    assert [(gap.interval, gap.kind) for gap in loop_gaps(lp, 4)] == [((0, 1), Gap.EXTERIOR), ((3, 5), Gap.EXTERIOR)]


@settings(deadline=None)
@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=0, max_value=40))
def test_loop_decomposition(seed, n):
    """loops cover the backbone, share only arc endpoints and tile with their gaps"""
    structure = sample_uniform(SamplerConfig(n, seed=seed))
    found = loops(structure)
    assert len(found) == len(structure.arcs) + 1
    covered = Counter(pos for lp in found for pos in lp.vertices)
    assert set(covered) == set(range(n + 2))
    for pos in range(n + 2):
        if structure.partners[pos] == -1:
            assert covered[pos] == 1
        elif pos in (0, n + 1):
            assert covered[pos] == 1
        else:
            assert covered[pos] == 2
    for lp in found:
        gaps = loop_gaps(lp, n)
        assert len(gaps) == len(lp.intervals) + 1
        for gap, block in zip(gaps, lp.intervals):
            assert gap.interval[1] == block[0]
        for gap, block in zip(gaps[1:], lp.intervals):
            assert gap.interval[0] == block[1]
        assert gaps[0].interval[0] == 0 and gaps[-1].interval[1] == n + 1


# fmt: off
@pytest.mark.parametrize("n, min_gap, expected", [
    (0, 0, 1), (1, 0, 1), (2, 0, 2), (3, 0, 4), (4, 0, 9), (5, 0, 21),
    (3, 3, 1), (5, 3, 2), (6, 3, 4), (4, 1, 4),
])
# fmt: on
def test_count_structures(n, min_gap, expected):
    assert count_structures(n, min_gap) == expected


@pytest.mark.parametrize("n", range(11))
@pytest.mark.parametrize("min_gap", [0, 1, 3])
def test_count_matches_enumeration(n, min_gap):
    assert count_structures(n, min_gap) == len(set(enumerate_structures(n, min_gap)))


def test_count_structures_negative():
    with pytest.raises(ValueError):
        count_structures(-1)


def test_enumeration_n4():
    assert sorted(enumerate_structures(4)) == sorted(STRUCTURES_N4)


def test_sampler_config_validation():
    for kwargs in ({"n": -1}, {"n": 3, "min_gap": -2}, {"n": 3, "seed": -1}, {"n": 3, "seed": 2**64}):
        with pytest.raises(ValueError):
            SamplerConfig(**kwargs)


def test_sample_deterministic():
    """same seed and parameters give identical structures"""
    cfg = SamplerConfig(60, min_gap=3, seed=99)
    assert sample_uniform(cfg) == sample_uniform(cfg)
    first = [sample_pair(30, 0, make_rng(7, idx)) for idx in range(5)]
    second = [sample_pair(30, 0, make_rng(7, idx)) for idx in range(5)]
    assert first == second


@pytest.mark.parametrize("seed", TEST_SEEDS)
def test_sample_respects_min_gap(seed):
    structure = sample_uniform(SamplerConfig(80, min_gap=3, seed=seed))
    assert all(arc.end - arc.start - 1 >= 3 for arc in structure.arcs)
    assert validate_arcs(80, structure.arcs) == structure


def test_sample_small_cases():
    """n = 0 and forbidden arcs leave only the empty structure"""
    assert sample_uniform(SamplerConfig(0)).arcs == ()
    for seed in TEST_SEEDS:
        assert sample_uniform(SamplerConfig(3, min_gap=3, seed=seed)).arcs == ()


@pytest.mark.parametrize("n", range(7))
def test_sample_uniform_chi_square(n):
    """10000 draws per structure are uniform over every structure on n positions"""
    structures = sorted(enumerate_structures(n))
    assert len(structures) == count_structures(n)
    rng = make_rng(2024, n)
    cfg = SamplerConfig(n)
    tally = Counter(sample_uniform(cfg, rng).to_dot_bracket() for _ in range(10000 * len(structures)))
    assert set(tally) == set(structures)
    if len(structures) > 1:
        result = stats.chisquare([tally[line] for line in structures])
        assert result.pvalue > 0.001


def test_randbelow():
    rng = make_rng(5)
    assert randbelow(rng, 1) == 0
    big = 3**80
    draws = [randbelow(rng, big) for _ in range(50)]
    assert all(0 <= value < big for value in draws)
    assert len(set(draws)) == 50
    with pytest.raises(ValueError):
        randbelow(rng, 0)


def test_empty_structure():
    """only the rainbow: a one-element poset, one loop, two degenerate gaps"""
    structure = parse_dot_bracket("....")
    poset = arc_poset(structure)
    assert poset.elements == (Arc(0, 5),)
    assert poset.children(poset.root) == ()
    (rainbow,) = loops(structure)
    assert rainbow.intervals == ((0, 5),)
    assert [gap.interval for gap in loop_gaps(rainbow, 4)] == [(0, 0), (5, 5)]
