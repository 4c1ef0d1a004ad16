# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Weight filtration of a loop nerve and its homological t-spectrum."""

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .homology import TOP_DIM, boundary_matrices, homology
from .nerve import NerveComplex, Simplex

log = logging.getLogger()

Bar = Tuple[int, int]


def filtered_complex(nerve: NerveComplex, t: int) -> NerveComplex:
    """
    Subcomplex K^t of the simplices with weight at least `t`.

    Faces weigh at least as much as their cofaces, so K^t is closed under faces.
    ``t = 1`` returns the full nerve.
    """
    if t < 1:
        raise ValueError(f"filtration level must be >= 1, got {t}")
    if t == 1:
        return nerve
    strata = [tuple(simplex for simplex in stratum if simplex.weight >= t) for stratum in nerve.strata]
    while strata and not strata[-1]:
        strata.pop()
    return dataclasses.replace(nerve, strata=tuple(strata))


@dataclass
class FilteredHomology:
    """
    The t-spectrum of a loop nerve.

    Attributes
    ----------
    levels : dict
        t -> integral Betti numbers (b0, b1, b2, b3) of K^t, for t = 1..max weight.
    bars : dict
        dim -> list of [birth, death] bars over the two-element field, sorted.
        A bar [b, d] is a class present in K^t for every d < t <= b; essential
        classes have d = 0.
    """

    levels: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    bars: Dict[int, List[Bar]] = field(default_factory=dict)

    @property
    def max_weight(self) -> int:
        return max(self.levels, default=0)

    def field_betti(self, t: int) -> Tuple[int, ...]:
        """Betti numbers of K^t over the two-element field, read off the bars."""
        return tuple(
            sum(1 for birth, death in self.bars.get(dim, []) if death < t <= birth) for dim in range(TOP_DIM + 1)
        )

    def discrepancies(self) -> List[Tuple[int, Tuple[int, ...], Tuple[int, ...]]]:
        """Levels where integral and field Betti numbers differ: (t, integral, field)."""
        result = []
        for t, betti in sorted(self.levels.items()):
            mod2 = self.field_betti(t)
            if mod2 != betti:
                result.append((t, betti, mod2))
        return result

    def to_dict(self) -> dict:
        return {
            "levels": {str(t): list(betti) for t, betti in sorted(self.levels.items())},
            "bars": {str(dim): [list(bar) for bar in self.bars.get(dim, [])] for dim in range(TOP_DIM + 1)},
        }


def filtration_order(nerve: NerveComplex) -> List[Simplex]:
    """Simplices by decreasing weight, then dimension, then vertices; every face precedes its cofaces."""
    return sorted(nerve.simplices(), key=lambda simplex: (-simplex.weight, simplex.dim, simplex.vertices))


def persistence_bars(nerve: NerveComplex) -> Dict[int, List[Bar]]:
    """
    Bars of the decreasing-weight filtration by standard column reduction over GF(2).

    Columns are sets of row indices; adding columns is symmetric difference.
    """
    ordered = filtration_order(nerve)
    index = {simplex.vertices: idx for idx, simplex in enumerate(ordered)}
    reduced: List[set] = []
    pivot_of: Dict[int, int] = {}
    for col, simplex in enumerate(ordered):
        column = {index[face] for face in simplex.faces()} if simplex.dim else set()
        while column:
            low = max(column)
            if low not in pivot_of:
                pivot_of[low] = col
                break
            column ^= reduced[pivot_of[low]]
        reduced.append(column)

    bars: Dict[int, List[Bar]] = {dim: [] for dim in range(TOP_DIM + 1)}
    killers = set(pivot_of.values())
    for row, col in pivot_of.items():
        birth, death = ordered[row].weight, ordered[col].weight
        if birth != death:
            bars[ordered[row].dim].append((birth, death))
    for idx, simplex in enumerate(ordered):
        if idx not in pivot_of and idx not in killers:
            bars[simplex.dim].append((simplex.weight, 0))
    return {dim: sorted(values, reverse=True) for dim, values in bars.items()}


def persistence_spectrum(nerve: NerveComplex) -> FilteredHomology:
    """
    Integral Betti numbers of every K^t and the field-coefficient bars.

    K^t only changes where t crosses a simplex weight, so homology is computed
    once per distinct weight and reused for the levels in between.
    """
    weights = sorted({simplex.weight for simplex in nerve.simplices()})
    at_weight = {}
    for weight in weights:
        cc = boundary_matrices(filtered_complex(nerve, weight))
        at_weight[weight] = homology(cc, check=False, generators=False).betti
    levels = {}
    for t in range(1, max(weights, default=0) + 1):
        levels[t] = at_weight[min(weight for weight in weights if weight >= t)]
    spectrum = FilteredHomology(levels, persistence_bars(nerve))
    for t, integral, mod2 in spectrum.discrepancies():
        log.warning("level t=%d: integral betti %s differ from field betti %s", t, integral, mod2)
    return spectrum
