# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Integer simplicial homology of loop nerves."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .error import LoopHomError, TheoremViolation
from .nerve import NerveComplex, SimplicialOrder, Vertices, exposed_2faces
from .smith import smith_normal_form
from .structures import OWNER_S, OWNER_T, Arc

log = logging.getLogger()

TOP_DIM = 3

Chain = Dict[Vertices, int]


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Column-major integer matrix; ``columns[j]`` maps row index to a nonzero entry."""

    shape: Tuple[int, int]
    columns: Tuple[Dict[int, int], ...]

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.shape, dtype=object)
        for col, entries in enumerate(self.columns):
            for row, value in entries.items():
                dense[row, col] = value
        return dense

    def apply(self, vector: Dict[int, int]) -> Dict[int, int]:
        """Matrix times a sparse vector (column index -> coefficient)."""
        result: Dict[int, int] = {}
        for col, coeff in vector.items():
            for row, value in self.columns[col].items():
                result[row] = result.get(row, 0) + coeff * value
        return {row: value for row, value in result.items() if value}


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """
    Chain groups and boundary maps of a nerve under a simplicial order.

    Attributes
    ----------
    nerve : NerveComplex
        Source complex.
    order : SimplicialOrder
        Orientation of every simplex: its vertices listed by increasing rank.
    bases : tuple of tuple of Vertices
        ``bases[d]`` lists the oriented d-simplices, sorted by their rank sequences.
    D : tuple of SparseMatrix
        ``D[d - 1]`` is the boundary map from C_d to C_{d-1}, d = 1..3.
    """

    nerve: NerveComplex
    order: SimplicialOrder
    bases: Tuple[Tuple[Vertices, ...], ...]
    D: Tuple[SparseMatrix, ...]
    positions: Tuple[Dict[Vertices, int], ...] = field(repr=False)

    @property
    def D1(self) -> SparseMatrix:  # pylint: disable=invalid-name
        return self.D[0]

    @property
    def D2(self) -> SparseMatrix:  # pylint: disable=invalid-name
        return self.D[1]

    @property
    def D3(self) -> SparseMatrix:  # pylint: disable=invalid-name
        return self.D[2]

    def position(self, dim: int, vertices: Sequence[int]) -> int:
        """Basis index of a simplex given by its vertices in any order."""
        return self.positions[dim][tuple(sorted(vertices))]


def boundary_matrices(nerve: NerveComplex, order: Optional[SimplicialOrder] = None) -> ChainComplex:
    """
    Boundary maps d(r_0..r_d) = sum_i (-1)^i (r_0..r_{i-1}, r_{i+1}..r_d).

    The composition of consecutive maps is checked to vanish.

    Raises
    ------
    TheoremViolation
        If the nerve has simplices of dimension 4 or more.
    """
    if len(nerve.strata) > TOP_DIM + 1:
        raise TheoremViolation(
            f"nerve has {len(nerve.strata[TOP_DIM + 1])} simplices of dimension {TOP_DIM + 1}", TOP_DIM + 1, ()
        )
    order = order if order is not None else nerve.order
    bases, positions = [], []
    for dim in range(TOP_DIM + 1):
        oriented = sorted(
            (order.sort(simplex.vertices) for simplex in nerve.K(dim)),
            key=lambda verts: [order.rank[idx] for idx in verts],
        )
        bases.append(tuple(oriented))
        positions.append({tuple(sorted(verts)): idx for idx, verts in enumerate(oriented)})

    matrices = []
    for dim in range(1, TOP_DIM + 1):
        columns = []
        for verts in bases[dim]:
            entries = {}
            for idx in range(len(verts)):
                face = verts[:idx] + verts[idx + 1 :]
                entries[positions[dim - 1][tuple(sorted(face))]] = -1 if idx % 2 else 1
            columns.append(entries)
        matrices.append(SparseMatrix((len(bases[dim - 1]), len(bases[dim])), tuple(columns)))

    for lower, upper in zip(matrices, matrices[1:]):
        for col, entries in enumerate(upper.columns):
            if lower.apply(entries):
                raise LoopHomError(f"boundary of boundary is nonzero on column {col}")
    return ChainComplex(nerve, order, tuple(bases), tuple(matrices), tuple(positions))


@dataclass(frozen=True)
class HomologyResult:
    """
    Homology of a loop nerve.

    Attributes
    ----------
    betti : tuple of int
        (b0, b1, b2, b3).
    torsion : tuple of tuple of int
        Invariant factors greater than one, per dimension.
    ranks : tuple of int
        Ranks of D1, D2, D3.
    euler : int
        Alternating sum of simplex counts.
    h2_generators : tuple of Chain
        Integer 2-cycles whose classes freely generate H2; keys are oriented simplices.
    """

    betti: Tuple[int, ...]
    torsion: Tuple[Tuple[int, ...], ...]
    ranks: Tuple[int, ...]
    euler: int
    h2_generators: Tuple[Chain, ...] = ()

    @property
    def h2_rank(self) -> int:
        return self.betti[2]


def euler_characteristic(nerve: NerveComplex) -> int:
    """
    Alternating sum of the simplex counts.

    Example
    -------
    >>> from loophom.nerve import build_nerve
    >>> from loophom.structures import BiSecondaryStructure
    >>> euler_characteristic(build_nerve(BiSecondaryStructure.from_dot_bracket("(.).", ".(.)")))
    2
    """
    return sum((-1) ** dim * count for dim, count in enumerate(nerve.counts()))


def homology(cc: ChainComplex, check: bool = True, generators: bool = True) -> HomologyResult:
    """
    Betti numbers and torsion of a chain complex from the Smith forms of its boundary maps.

    Parameters
    ----------
    cc : ChainComplex
        Boundary maps of a nerve.
    check : bool, default True
        Enforce the homology of a bi-secondary loop nerve: b0 = 1, b1 = b3 = 0
        and no torsion. Filtered subcomplexes are computed with ``check=False``.
    generators : bool, default True
        Also compute H2 generators.

    Raises
    ------
    TheoremViolation
        When `check` is set and the result is not that of a bi-secondary nerve.
    """
    sizes = [len(basis) for basis in cc.bases]
    forms = [smith_normal_form(matrix.to_dense(), transforms=False) for matrix in cc.D]
    ranks = tuple(form.rank for form in forms)
    padded = (0,) + ranks + (0,)
    betti = tuple(sizes[dim] - padded[dim] - padded[dim + 1] for dim in range(TOP_DIM + 1))
    torsion = tuple(forms[dim].torsion for dim in range(TOP_DIM)) + ((),)
    euler = sum((-1) ** dim * size for dim, size in enumerate(sizes))
    log.debug("homology sizes=%s ranks=%s betti=%s", sizes, ranks, betti)

    if check:
        expected = {0: 1, 1: 0, 3: 0}
        for dim, value in expected.items():
            if betti[dim] != value:
                raise TheoremViolation(f"b{dim} = {betti[dim]}, expected {value}", dim, ranks, betti, torsion)
        for dim, factors in enumerate(torsion):
            if factors:
                raise TheoremViolation(f"torsion {factors} in dimension {dim}", dim, ranks, betti, torsion)

    gens: Tuple[Chain, ...] = ()
    if generators and betti[2]:
        gens = tuple(h2_generators(cc, check=check))
    return HomologyResult(betti, torsion, ranks, euler, gens)


def _chain_vector(chain: Chain, cc: ChainComplex) -> Dict[int, int]:
    return {cc.position(2, verts): coeff for verts, coeff in chain.items()}


def _to_chain(column: Sequence[int], cc: ChainComplex) -> Chain:
    return {cc.bases[2][idx]: int(coeff) for idx, coeff in enumerate(column) if coeff}


def h2_generators(cc: ChainComplex, check: bool = True) -> List[Chain]:
    """
    Integer 2-cycles freely generating H2.

    A Z-basis of ker D2 is read off the Smith transform of D2; the Smith form of
    D3 written in that basis splits it into boundaries and a complement, whose
    columns are the generators. Each generator is then reduced by the 3-simplex
    boundaries so that its coefficient vanishes on the first exposed 2-face of
    every 3-simplex, and its sign is fixed so the first coefficient is positive.

    Parameters
    ----------
    cc : ChainComplex
        Boundary maps of a nerve.
    check : bool, default True
        Verify that every generator is a cycle and that the generators are
        independent modulo boundaries.

    Returns
    -------
    list of Chain
        Maps from oriented 2-simplices to nonzero coefficients.
    """
    d2 = cc.D2.to_dense()
    d3 = cc.D3.to_dense()
    edges, triangles = d2.shape
    if triangles == 0:
        return []
    form2 = smith_normal_form(d2)
    kernel = form2.V[:, form2.rank :]
    if kernel.shape[1] == 0:
        return []
    coords = form2.V_inv[form2.rank :, :].dot(d3) if d3.shape[1] else np.zeros((kernel.shape[1], 0), dtype=object)
    form3 = smith_normal_form(coords)
    basis = kernel.dot(form3.U_inv)
    gens = [basis[:, col].copy() for col in range(form3.rank, basis.shape[1])]

    # exposed faces belong to a single 3-simplex, so the reductions do not interfere
    for col, verts in enumerate(cc.bases[3]):
        exposed = exposed_2faces(cc.nerve.index[tuple(sorted(verts))], cc.nerve)
        if not exposed:
            continue
        pivot = cc.position(2, exposed[0].vertices)
        sign = cc.D3.columns[col][pivot]
        for gen in gens:
            if gen[pivot]:
                factor = gen[pivot] * sign
                for row, value in cc.D3.columns[col].items():
                    gen[row] -= factor * value

    chains = []
    for gen in gens:
        lead = next(value for value in gen if value)
        if lead < 0:
            gen = -gen
        chains.append(_to_chain(gen, cc))

    if check:
        for chain in chains:
            if cc.D2.apply(_chain_vector(chain, cc)):
                raise LoopHomError("H2 generator is not a cycle")
        stacked = np.zeros((triangles, d3.shape[1] + len(chains)), dtype=object)
        stacked[:, : d3.shape[1]] = d3
        for idx, chain in enumerate(chains):
            for row, coeff in _chain_vector(chain, cc).items():
                stacked[row, d3.shape[1] + idx] = coeff
        expected = form3.rank + len(chains)
        if smith_normal_form(stacked, transforms=False).rank != expected:
            raise LoopHomError("H2 generators are dependent modulo boundaries")
    log.debug("h2 generators: %d over %d edges", len(chains), edges)
    return chains


@dataclass(frozen=True)
class SupportReport:
    """Loops occurring in an H2 generator, grouped by owner, with their maximal arcs."""

    s_loops: Tuple[int, ...] = ()
    t_loops: Tuple[int, ...] = ()
    s_arcs: Tuple[Arc, ...] = ()
    t_arcs: Tuple[Arc, ...] = ()

    @property
    def loops(self) -> Tuple[int, ...]:
        return self.s_loops + self.t_loops

    def to_dict(self) -> dict:
        return {
            "S": {"loops": list(self.s_loops), "arcs": [arc.as_list() for arc in self.s_arcs]},
            "T": {"loops": list(self.t_loops), "arcs": [arc.as_list() for arc in self.t_arcs]},
        }


def generator_support(generator: Optional[Chain], nerve: NerveComplex) -> SupportReport:
    """Support of a 2-chain; the certificate of a pair of mutually exclusive substructures."""
    if not generator:
        return SupportReport()
    members = sorted({idx for verts in generator for idx in verts})
    s_loops = tuple(idx for idx in members if nerve.owner(idx) == OWNER_S)
    t_loops = tuple(idx for idx in members if nerve.owner(idx) == OWNER_T)
    return SupportReport(
        s_loops,
        t_loops,
        tuple(sorted(nerve.loops[idx].max_arc for idx in s_loops)),
        tuple(sorted(nerve.loops[idx].max_arc for idx in t_loops)),
    )
