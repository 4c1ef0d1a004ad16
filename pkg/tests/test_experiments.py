# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Tests for the verification battery and rank sampling"""

import pickle
import unittest
from collections import Counter

import pytest

from loophom.experiments import (
    InstanceRecord,
    RankHistogram,
    VerifyOptions,
    sample_ranks,
    verify_instance,
    verify_pairs,
    verify_random,
)
from loophom.nerve import LEMMA_NAMES
from loophom.structures import BiSecondaryStructure

from .testdata import NESTED, RANKS_N50_SEED42_FIRST200, RIBOSWITCH, TETRAHEDRON


class TestVerifyInstance(unittest.TestCase):
    """the whole battery on the smallest crossing pair"""

    def setUp(self):
        self.pair = BiSecondaryStructure.from_dot_bracket(*TETRAHEDRON)

    def test_checks(self):
        record = verify_instance(self.pair, options=VerifyOptions(oracle=True, certificates=True))
        self.assertTrue(record.passed)
        expected = {f"lemma:{name}" for name in LEMMA_NAMES} | {
            "delta",
            "theorems",
            "euler",
            "generators",
            "filtration",
            "order_invariance",
            "oracle_nerve",
            "oracle_betti",
        }
        self.assertEqual(set(record.checks), expected)
        self.assertEqual(record.betti, (1, 0, 1, 0))
        self.assertEqual(record.counts, (4, 6, 4, 0))
        self.assertEqual(set(record.certificates), {2, 3})

    def test_swapped(self):
        record = verify_instance(self.pair, options=VerifyOptions(swapped=True))
        self.assertEqual(record.swapped_checked, 2)

    def test_record_roundtrip(self):
        """records come back from worker processes"""
        record = verify_instance(self.pair)
        copy = pickle.loads(pickle.dumps(record))
        self.assertEqual(copy.checks, record.checks)
        self.assertEqual(copy.pair, self.pair)


def test_failed_record():
    record = InstanceRecord(0, "(.).", ".(.)", checks={"theorems": False, "delta": True})
    assert not record.passed


@pytest.mark.parametrize("min_gap", [0, 3])
def test_verify_random(min_gap):
    summary = verify_random(12, 20, min_gap, seed=1, options=VerifyOptions(oracle=False))
    assert summary.total == 12
    assert summary.ok, "\n".join(summary.lines())
    assert summary.first_failure is None
    assert summary.lines()[0] == "instances 12"


def test_verify_random_oracle():
    summary = verify_random(6, 10, seed=3, options=VerifyOptions(oracle=True))
    assert summary.ok
    assert summary.checked["oracle_betti"] == 6


def test_verify_pairs_parallel():
    """a process pool returns the same records in the same order"""
    pairs = [BiSecondaryStructure.from_dot_bracket(*lines) for lines in (TETRAHEDRON, NESTED, RIBOSWITCH)]
    serial = verify_pairs(pairs, seed=4)
    parallel = verify_pairs(pairs, seed=4, jobs=2)
    assert [record.betti for record in serial.records] == [(1, 0, 1, 0), (1, 0, 0, 0), (1, 0, 1, 0)]
    assert [record.betti for record in parallel.records] == [record.betti for record in serial.records]
    assert parallel.checked == serial.checked


# fmt: off
@pytest.mark.parametrize("s_line, t_line, extensions, expected", [
    ("(.).", ".(.)", 3, 1),
    ("()()..", "......", 3, 2),
    ("()()()", "......", 3, 3),
    ("()()()", "(....)", 10, 6),
])
# fmt: on
def test_distinct_orders(s_line, t_line, extensions, expected):
    """the invariance check uses distinct orders, as many as the loop trees allow"""
    pair = BiSecondaryStructure.from_dot_bracket(s_line, t_line)
    record = verify_instance(pair, seed=5, options=VerifyOptions(extensions=extensions))
    assert record.orders_checked == expected
    assert record.checks["order_invariance"]


def test_sample_ranks():
    histogram = sample_ranks(16, 30, seed=9)
    assert histogram.total == 30
    assert sum(histogram.bins.values()) == 30
    assert min(histogram.bins) >= 0
    assert sample_ranks(16, 30, seed=9, jobs=2).bins == histogram.bins


def test_sample_ranks_regression():
    """n=50 pairs from seed 42 keep their ranks; instance i depends only on (seed, i)"""
    prefix = sample_ranks(50, 200, seed=42)
    assert prefix.to_dict() == {"bins": RANKS_N50_SEED42_FIRST200, "total": 200, "n": 50, "min_gap": 0, "seed": 42}
    histogram = sample_ranks(50, 1000, seed=42, jobs=2)
    assert sum(histogram.bins.values()) == 1000
    assert 0 < histogram.frequency(1) < 1
    assert all(histogram.bins[rank] >= count for rank, count in prefix.bins.items())


def test_sample_ranks_min_gap():
    """with arcs needing four bases, four positions allow no arcs at all"""
    histogram = sample_ranks(4, 10, min_gap=3, seed=0)
    assert histogram.bins == Counter({0: 10})


def test_histogram_table():
    histogram = RankHistogram(Counter({0: 3, 1: 1}), 4, 50, 0, 42)
    assert histogram.frequency(1) == 0.25
    assert histogram.frequency(7) == 0.0
    assert histogram.table().splitlines() == [
        "# n=50 min_gap=0 seed=42 total=4",
        "rank count frequency",
        "0 3 0.7500",
        "1 1 0.2500",
    ]
    assert histogram.to_dict()["bins"] == {"0": 3, "1": 1}
