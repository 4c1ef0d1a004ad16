# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Independent reference computations used to cross-check the fast paths."""

import itertools
from typing import Dict, FrozenSet, List, Sequence, Tuple

import sympy

from .homology import TOP_DIM, ChainComplex
from .nerve import NerveComplex, Vertices
from .structures import Loop

MAX_ORACLE_LOOPS = 20


def brute_force_simplices(table: Sequence[Loop], max_size: int = TOP_DIM + 2) -> Dict[Vertices, FrozenSet[int]]:
    """
    All loop subsets of size at most `max_size` with nonempty common intersection.

    Subsets of size TOP_DIM + 2 are included, so a nerve free of 4-simplices
    can be confirmed directly.
    """
    if len(table) > MAX_ORACLE_LOOPS:
        raise ValueError(f"brute force limited to {MAX_ORACLE_LOOPS} loops, got {len(table)}")
    found = {}
    for size in range(1, max_size + 1):
        for subset in itertools.combinations(range(len(table)), size):
            common = frozenset.intersection(*(table[idx].vertices for idx in subset))
            if common:
                found[subset] = common
    return found


def nerve_mismatches(nerve: NerveComplex) -> List[Tuple[Vertices, str]]:
    """Differences between `nerve` and the brute-force nerve over the same loop table."""
    expected = brute_force_simplices(nerve.loops)
    actual = {simplex.vertices: frozenset(simplex.intersection) for simplex in nerve.simplices()}
    problems = []
    for verts in sorted(set(expected) | set(actual)):
        if verts not in actual:
            problems.append((verts, "missing"))
        elif verts not in expected:
            problems.append((verts, "spurious"))
        elif expected[verts] != actual[verts]:
            problems.append((verts, "intersection"))
    return problems


def rational_rank(matrix) -> int:
    """Rank over the rationals by sympy's exact elimination."""
    rows, cols = matrix.shape
    if not rows or not cols:
        return 0
    return sympy.Matrix(rows, cols, [int(value) for value in matrix.flatten()]).rank()


def rational_betti(cc: ChainComplex) -> Tuple[int, ...]:
    """Betti numbers from rational ranks of the boundary maps."""
    sizes = [len(basis) for basis in cc.bases]
    ranks = (0,) + tuple(rational_rank(matrix.to_dense()) for matrix in cc.D) + (0,)
    return tuple(sizes[dim] - ranks[dim] - ranks[dim + 1] for dim in range(TOP_DIM + 1))
