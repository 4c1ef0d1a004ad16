# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Tests for boundary maps, integer homology and H2 generators"""

import dataclasses
import pickle
import unittest

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loophom.error import LoopHomError, TheoremViolation
from loophom.filtration import filtered_complex
from loophom.homology import (
    boundary_matrices,
    euler_characteristic,
    generator_support,
    h2_generators,
    homology,
)
from loophom.nerve import Simplex, build_nerve, simplicial_order
from loophom.oracle import rational_betti
from loophom.structures import Arc, BiSecondaryStructure, make_rng, sample_pair

from .testdata import EMPTY, NESTED, RIBOSWITCH, TETRAHEDRON_GENERATOR, TWIN_HAIRPIN


def homology_of(s_line, t_line):
    nerve = build_nerve(BiSecondaryStructure.from_dot_bracket(s_line, t_line))
    return nerve, homology(boundary_matrices(nerve))


def chain_boundary(cc, chain):
    return cc.D2.apply({cc.position(2, verts): coeff for verts, coeff in chain.items()})


def test_empty_pair_boundary(empty_nerve):
    cc = boundary_matrices(empty_nerve)
    assert np.array_equal(cc.D1.to_dense(), np.array([[-1], [1]], dtype=object))
    assert cc.D2.shape == (1, 0)
    result = homology(cc)
    assert result.betti == (1, 0, 0, 0)
    assert result.h2_generators == ()
    assert result.euler == 1


class TestTetrahedron(unittest.TestCase):
    """the boundary of a tetrahedron carries exactly one H2 class"""

    def setUp(self):
        self.nerve = build_nerve(BiSecondaryStructure.from_dot_bracket("(.).", ".(.)"))
        self.cc = boundary_matrices(self.nerve)

    def test_boundary_maps(self):
        self.assertEqual(self.cc.D2.shape, (6, 4))
        self.assertEqual(self.cc.D3.shape, (4, 0))
        self.assertEqual(self.cc.bases[1], ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
        # d(0, 1, 2) = (1, 2) - (0, 2) + (0, 1)
        self.assertEqual(self.cc.D2.columns[0], {3: 1, 1: -1, 0: 1})
        product = self.cc.D1.to_dense().dot(self.cc.D2.to_dense())
        self.assertFalse(product.any())

    def test_homology(self):
        result = homology(self.cc)
        self.assertEqual(result.betti, (1, 0, 1, 0))
        self.assertEqual(result.torsion, ((), (), (), ()))
        self.assertEqual(result.ranks, (3, 3, 0))
        self.assertEqual(result.euler, 2)
        self.assertEqual(result.h2_rank, 1)

    def test_generator(self):
        (generator,) = homology(self.cc).h2_generators
        self.assertEqual(generator, TETRAHEDRON_GENERATOR)
        self.assertEqual(chain_boundary(self.cc, generator), {})

    def test_support(self):
        support = generator_support(TETRAHEDRON_GENERATOR, self.nerve)
        self.assertEqual(support.s_loops, (0, 1))
        self.assertEqual(support.t_loops, (2, 3))
        self.assertEqual(support.s_arcs, (Arc(0, 5), Arc(1, 3)))
        self.assertEqual(support.t_arcs, (Arc(0, 5), Arc(2, 4)))
        self.assertEqual(support.loops, (0, 1, 2, 3))
        self.assertEqual(support.to_dict()["T"], {"loops": [2, 3], "arcs": [[0, 5], [2, 4]]})

    def test_reversed_order(self):
        """a different simplicial order orients simplices differently but keeps the class"""
        order = simplicial_order(self.nerve, reverse_siblings=True)
        cc = boundary_matrices(self.nerve, order)
        result = homology(cc)
        self.assertEqual(result.betti, (1, 0, 1, 0))
        (generator,) = result.h2_generators
        self.assertEqual(chain_boundary(cc, generator), {})
        self.assertEqual({abs(coeff) for coeff in generator.values()}, {1})


def test_euler_characteristic(tetrahedron_nerve, empty_nerve):
    assert euler_characteristic(tetrahedron_nerve) == 2
    assert euler_characteristic(empty_nerve) == 1


# fmt: off
@pytest.mark.parametrize("pair, betti", [
    (EMPTY, (1, 0, 0, 0)),
    (NESTED, (1, 0, 0, 0)),
    (TWIN_HAIRPIN, (1, 0, 0, 0)),
    (RIBOSWITCH, (1, 0, 1, 0)),
    (("((...))((...))", ".............."), (1, 0, 0, 0)),
])
# fmt: on
def test_known_pairs(pair, betti):
    nerve, result = homology_of(*pair)
    assert result.betti == betti
    assert len(result.h2_generators) == betti[2]
    assert result.euler == 1 + betti[2]


def test_riboswitch_support():
    """the generator involves loops of both structures"""
    nerve, result = homology_of(*RIBOSWITCH)
    support = generator_support(result.h2_generators[0], nerve)
    assert support.s_loops and support.t_loops
    assert generator_support(None, nerve).loops == ()


def test_twin_hairpin_has_no_generators():
    nerve, _ = homology_of(*TWIN_HAIRPIN)
    assert h2_generators(boundary_matrices(nerve)) == []


def test_disconnected_subcomplex_violates(tetrahedron_nerve):
    """K^5 of the tetrahedron is two points; checked homology refuses it"""
    cc = boundary_matrices(filtered_complex(tetrahedron_nerve, 5))
    with pytest.raises(TheoremViolation) as info:
        homology(cc)
    assert info.value.dimension == 0
    assert info.value.betti == (2, 0, 0, 0)
    assert homology(cc, check=False).betti == (2, 0, 0, 0)
    copy = pickle.loads(pickle.dumps(info.value))
    assert copy.ranks == info.value.ranks


def test_four_simplex_violates():
    nerve = build_nerve(BiSecondaryStructure.from_dot_bracket(*TWIN_HAIRPIN))
    fake = dataclasses.replace(nerve, strata=nerve.strata + ((Simplex((0, 1, 2, 3, 4), (1,)),),))
    with pytest.raises(TheoremViolation) as info:
        boundary_matrices(fake)
    assert info.value.dimension == 4
    assert isinstance(info.value, LoopHomError)


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=0, max_value=20))
def test_random_pairs(seed, n):
    """b0 = 1, b1 = b3 = 0, no torsion, and rank H2 = chi - 1 on uniform pairs"""
    nerve = build_nerve(sample_pair(n, 0, make_rng(seed)))
    cc = boundary_matrices(nerve)
    result = homology(cc)
    assert result.h2_rank == euler_characteristic(nerve) - 1
    assert rational_betti(cc) == result.betti
    for chain in result.h2_generators:
        assert chain_boundary(cc, chain) == {}
    other = simplicial_order(nerve, rng=make_rng(seed, 1))
    assert homology(boundary_matrices(nerve, other), generators=False).betti == result.betti


@pytest.mark.parametrize("seed", range(8))
def test_hairpin_constrained_pairs(seed):
    nerve = build_nerve(sample_pair(40, 3, make_rng(seed)))
    result = homology(boundary_matrices(nerve))
    assert result.betti[:2] == (1, 0)
    assert result.betti[3] == 0
