# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Loop nerve of a bi-secondary structure."""

import functools
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .structures import OWNER_S, OWNER_T, Arc, BiSecondaryStructure, Loop, SecondaryStructure, arc_poset, loops

log = logging.getLogger()

PURE = "pure"
MIXED = "mixed"

LoopId = int
Vertices = Tuple[LoopId, ...]


@dataclass(frozen=True)
class Simplex:
    """
    A d-simplex of the nerve: d+1 loops with nonempty common intersection.

    `vertices` are LoopIds in increasing order, `intersection` is the sorted
    backbone vertex set Omega(Y) and `weight` its size.
    """

    vertices: Vertices
    intersection: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def weight(self) -> int:
        return len(self.intersection)

    def faces(self) -> List[Vertices]:
        """Codimension-one faces, the i-th face omitting the i-th vertex."""
        return [self.vertices[:idx] + self.vertices[idx + 1 :] for idx in range(len(self.vertices))]


@dataclass(frozen=True)
class SimplicialOrder:
    """A total order on LoopIds; `rank[loop_id]` is the position of the loop."""

    rank: Tuple[int, ...]

    def sequence(self) -> Tuple[LoopId, ...]:
        """LoopIds listed in order."""
        return tuple(sorted(range(len(self.rank)), key=self.rank.__getitem__))

    def sort(self, vertices: Sequence[LoopId]) -> Vertices:
        return tuple(sorted(vertices, key=self.rank.__getitem__))

    def is_compliant(self, nerve: "NerveComplex") -> bool:
        """True if this is a linear extension of the ordinal sum of the two arc posets, S first."""
        if sorted(self.rank) != list(range(len(nerve.loops))):
            return False
        for loop_id, parent in enumerate(nerve.parents):
            if parent is not None and self.rank[loop_id] >= self.rank[parent]:
                return False
        s_ranks = [self.rank[idx] for idx in nerve.loop_ids(OWNER_S)]
        t_ranks = [self.rank[idx] for idx in nerve.loop_ids(OWNER_T)]
        return not s_ranks or not t_ranks or max(s_ranks) < min(t_ranks)


@dataclass(frozen=True)
class NerveComplex:
    """
    The weighted nerve of a set of loops.

    Attributes
    ----------
    n : int
        Sequence length; backbone vertices are 0..n+1.
    loops : tuple of Loop
        Loop table indexed by LoopId; S-loops come before T-loops.
    parents : tuple of int or None
        Parent LoopId in the tree of the owner structure, None for a rainbow loop.
    strata : tuple of tuple of Simplex
        ``strata[d]`` lists the d-simplices in lexicographic order of their vertices.
    incidence : tuple of tuple of LoopId
        For each backbone vertex, the loops containing it.
    order : SimplicialOrder
        Default simplicial order; LoopIds are assigned so that it is the identity.
    """

    n: int
    loops: Tuple[Loop, ...]
    parents: Tuple[Optional[LoopId], ...]
    strata: Tuple[Tuple[Simplex, ...], ...]
    incidence: Tuple[Tuple[LoopId, ...], ...]
    order: SimplicialOrder = field(compare=False)

    def owner(self, loop_id: LoopId) -> str:
        return self.loops[loop_id].owner

    def loop_ids(self, owner: Optional[str] = None) -> List[LoopId]:
        return [idx for idx, lp in enumerate(self.loops) if owner is None or lp.owner == owner]

    def children(self, loop_id: LoopId) -> List[LoopId]:
        """Loops whose maximal arcs are immediately covered by that of `loop_id`."""
        return [idx for idx, parent in enumerate(self.parents) if parent == loop_id]

    def K(self, dim: int) -> Tuple[Simplex, ...]:  # pylint: disable=invalid-name
        return self.strata[dim] if 0 <= dim < len(self.strata) else ()

    @property
    def dim(self) -> int:
        return len(self.strata) - 1

    def counts(self) -> Tuple[int, ...]:
        """Number of simplices per dimension, at least for dimensions 0..3."""
        return tuple(len(self.K(dim)) for dim in range(max(4, len(self.strata))))

    def simplices(self) -> Iterator[Simplex]:
        for stratum in self.strata:
            yield from stratum

    @functools.cached_property
    def index(self) -> Dict[Vertices, Simplex]:
        return {simplex.vertices: simplex for simplex in self.simplices()}

    def simplex(self, vertices: Sequence[LoopId]) -> Optional[Simplex]:
        return self.index.get(tuple(sorted(vertices)))

    def __contains__(self, vertices) -> bool:
        return tuple(sorted(vertices)) in self.index

    @functools.cached_property
    def cofaces(self) -> Dict[Vertices, List[Simplex]]:
        """Codimension-one cofaces of every simplex."""
        table = defaultdict(list)
        for simplex in self.simplices():
            if simplex.dim > 0:
                for face in simplex.faces():
                    table[face].append(simplex)
        return table

    @property
    def max_weight(self) -> int:
        return max((simplex.weight for simplex in self.K(0)), default=0)

    def is_pure(self, simplex: Simplex) -> bool:
        return len({self.owner(idx) for idx in simplex.vertices}) == 1


def _postorder(roots: Sequence[int], children: Dict[int, List[int]]) -> List[int]:
    """Children before parents, siblings in the given order."""
    result = []
    stack = [(node, False) for node in reversed(roots)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            result.append(node)
            continue
        stack.append((node, True))
        stack.extend((child, False) for child in reversed(children[node]))
    return result


def _ordered_loops(structure: SecondaryStructure, owner: str) -> Tuple[List[Loop], List[Optional[int]]]:
    """Loops of one structure in post-order of its tree, with local parent indices."""
    poset = arc_poset(structure)
    by_arc: Dict[Arc, Loop] = {lp.max_arc: lp for lp in loops(structure, owner)}
    children: Dict[Arc, List[Arc]] = {arc: [] for arc in poset.elements}
    for arc in poset.elements[1:]:
        children[poset.covers[arc]].append(arc)
    arcs = _postorder([poset.root], children)
    position = {arc: idx for idx, arc in enumerate(arcs)}
    parents = [position[poset.covers[arc]] if arc in poset.covers else None for arc in arcs]
    return [by_arc[arc] for arc in arcs], parents


def _assemble(n: int, structures: Sequence[Tuple[SecondaryStructure, str]]) -> NerveComplex:
    table: List[Loop] = []
    parents: List[Optional[int]] = []
    for structure, owner in structures:
        offset = len(table)
        ordered, local_parents = _ordered_loops(structure, owner)
        table.extend(ordered)
        parents.extend(None if parent is None else parent + offset for parent in local_parents)

    incidence: List[List[LoopId]] = [[] for _ in range(n + 2)]
    for loop_id, lp in enumerate(table):
        for vertex in lp.vertices:
            incidence[vertex].append(loop_id)

    # every simplex is witnessed by a backbone vertex lying in all of its loops
    omega: Dict[Vertices, List[int]] = defaultdict(list)
    for vertex, members in enumerate(incidence):
        for size in range(1, len(members) + 1):
            for subset in itertools.combinations(members, size):
                omega[subset].append(vertex)

    top = max((len(subset) for subset in omega), default=0)
    strata = [[] for _ in range(top)]
    for subset in sorted(omega):
        strata[len(subset) - 1].append(Simplex(subset, tuple(omega[subset])))

    nerve = NerveComplex(
        n=n,
        loops=tuple(table),
        parents=tuple(parents),
        strata=tuple(tuple(stratum) for stratum in strata),
        incidence=tuple(tuple(members) for members in incidence),
        order=SimplicialOrder(tuple(range(len(table)))),
    )
    log.debug("nerve n=%d loops=%d counts=%s", n, len(table), nerve.counts())
    return nerve


def build_nerve(pair: BiSecondaryStructure) -> NerveComplex:
    """
    Loop nerve of a bi-secondary structure.

    Simplices are enumerated from the incidence of backbone vertices: each vertex
    lies in at most two loops of each structure, so each vertex contributes at
    most 15 nonempty loop subsets.

    Example
    -------
    >>> build_nerve(BiSecondaryStructure.from_dot_bracket("(.).", ".(.)")).counts()
    (4, 6, 4, 0)
    """
    return _assemble(pair.n, [(pair.S, OWNER_S), (pair.T, OWNER_T)])


def build_structure_nerve(structure: SecondaryStructure) -> NerveComplex:
    """Nerve of the loops of a single secondary structure (a tree isomorphic to its arc poset)."""
    return _assemble(structure.n, [(structure, OWNER_S)])


def simplicial_order(
    nerve: NerveComplex, reverse_siblings: bool = False, rng: Optional[np.random.Generator] = None
) -> SimplicialOrder:
    """
    A linear extension of (T, <_T) + (S, <_S) with every S-loop first.

    Parameters
    ----------
    nerve : NerveComplex
        Source of the loop trees.
    reverse_siblings : bool, default False
        Post-order visiting children right to left instead of left to right.
    rng : numpy.random.Generator, optional
        If given, build each tree's order by repeatedly picking a random loop
        whose children are already placed.

    Returns
    -------
    SimplicialOrder
        The default (post-order, left to right) order is the identity on LoopIds.
    """
    sequence: List[LoopId] = []
    for owner in (OWNER_S, OWNER_T):
        members = nerve.loop_ids(owner)
        if not members:
            continue
        children = {idx: nerve.children(idx) for idx in members}
        roots = [idx for idx in members if nerve.parents[idx] is None]
        if rng is not None:
            pending = {idx: len(children[idx]) for idx in members}
            ready = sorted(idx for idx in members if not children[idx])
            while ready:
                node = ready.pop(int(rng.integers(len(ready))))
                sequence.append(node)
                parent = nerve.parents[node]
                if parent is not None:
                    pending[parent] -= 1
                    if pending[parent] == 0:
                        ready.append(parent)
        else:
            if reverse_siblings:
                children = {idx: list(reversed(kids)) for idx, kids in children.items()}
            sequence.extend(_postorder(roots, children))
    rank = [0] * len(nerve.loops)
    for position, loop_id in enumerate(sequence):
        rank[loop_id] = position
    return SimplicialOrder(tuple(rank))


def linear_extension_count(nerve: NerveComplex) -> int:
    """
    Number of distinct simplicial orders of `nerve`.

    Each loop tree of k loops has k! divided by the product of its subtree
    sizes linear extensions; S and T are ordered independently.

    >>> from loophom.structures import BiSecondaryStructure
    >>> linear_extension_count(build_nerve(BiSecondaryStructure.from_dot_bracket("()()()", "(....)")))
    6
    """
    sizes = [1] * len(nerve.loops)
    # post-order ids: every child precedes its parent
    for loop_id, parent in enumerate(nerve.parents):
        if parent is not None:
            sizes[parent] += sizes[loop_id]
    count = 1
    for owner in (OWNER_S, OWNER_T):
        members = nerve.loop_ids(owner)
        count *= math.factorial(len(members)) // math.prod(sizes[idx] for idx in members)
    return count


def classify_1simplex(simplex: Simplex, nerve: NerveComplex) -> str:
    """'pure' if both loops belong to the same structure, 'mixed' otherwise."""
    if simplex.dim != 1:
        raise ValueError(f"expected a 1-simplex, got dimension {simplex.dim}")
    return PURE if nerve.is_pure(simplex) else MIXED


def exposed_2faces(simplex: Simplex, nerve: NerveComplex) -> List[Simplex]:
    """2-faces of a 3-simplex contained in no other 3-simplex."""
    if simplex.dim != 3:
        raise ValueError(f"expected a 3-simplex, got dimension {simplex.dim}")
    return [nerve.index[face] for face in simplex.faces() if len(nerve.cofaces[face]) == 1]


@dataclass(frozen=True)
class NeighborGraph:
    """
    Neighbour graph Gr(c) of a centre loop c.

    Neighbours from the other structure are all loops adjacent to c; neighbours
    from c's own structure are the adjacent loops whose maximal arcs are
    immediately covered by that of c. `graph` is the subgraph of the 1-skeleton
    induced on these vertices, each edge flagged with ``delta=True`` when it
    spans a 2-simplex together with c.
    """

    center: LoopId
    s_neighbors: frozenset
    t_neighbors: frozenset
    graph: nx.Graph = field(compare=False)

    @property
    def vertices(self) -> frozenset:
        return self.s_neighbors | self.t_neighbors

    @property
    def edges(self) -> List[Tuple[LoopId, LoopId]]:
        return sorted(tuple(sorted(edge)) for edge in self.graph.edges)

    @property
    def delta_edges(self) -> List[Tuple[LoopId, LoopId]]:
        return sorted(tuple(sorted((u, v))) for u, v, delta in self.graph.edges(data="delta") if delta)


def neighbor_graph(center: LoopId, nerve: NerveComplex) -> NeighborGraph:
    own = nerve.owner(center)
    adjacent = {idx for simplex in nerve.cofaces[(center,)] for idx in simplex.vertices if idx != center}
    same = frozenset(idx for idx in adjacent if nerve.owner(idx) == own and nerve.parents[idx] == center)
    other = frozenset(idx for idx in adjacent if nerve.owner(idx) != own)
    members = same | other

    graph = nx.Graph()
    graph.add_nodes_from(sorted(members))
    for edge in nerve.K(1):
        u, v = edge.vertices
        if u in members and v in members:
            graph.add_edge(u, v, delta=(u, v, center) in nerve)
    if own == OWNER_T:
        return NeighborGraph(center, other, same, graph)
    return NeighborGraph(center, same, other, graph)


class DeltaCheck(NamedTuple):
    """Outcome of a Delta-graph existence check.

    `certificate` is a spanning tree of the delta edges when `exists`, otherwise
    the connected components of the delta-edge subgraph.
    """

    exists: bool
    certificate: Tuple


def delta_graph_exists(center: LoopId, nerve: NerveComplex) -> DeltaCheck:
    """
    Check that the delta edges of Gr(center) form a connected spanning subgraph.

    Neighbour sets with at most one vertex pass vacuously.
    """
    neighbors = neighbor_graph(center, nerve)
    if len(neighbors.vertices) <= 1:
        return DeltaCheck(True, ())
    delta = nx.Graph()
    delta.add_nodes_from(neighbors.graph.nodes)
    delta.add_edges_from(neighbors.delta_edges)
    if nx.is_connected(delta):
        tree = nx.minimum_spanning_tree(delta)
        return DeltaCheck(True, tuple(sorted(tuple(sorted(edge)) for edge in tree.edges)))
    components = tuple(sorted(tuple(sorted(comp)) for comp in nx.connected_components(delta)))
    return DeltaCheck(False, components)


def delta_checks(nerve: NerveComplex, owner: str = OWNER_T) -> Dict[LoopId, DeltaCheck]:
    """Delta-graph checks for every loop of one structure."""
    return {loop_id: delta_graph_exists(loop_id, nerve) for loop_id in nerve.loop_ids(owner)}


@dataclass
class LemmaCheck:
    name: str
    checked: int = 0
    failures: List[Vertices] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, ok: bool, witness: Vertices) -> None:
        self.checked += 1
        if not ok:
            self.failures.append(witness)


@dataclass
class LemmaReport:
    """Pass/fail and counterexample witnesses for each structural property of a nerve."""

    checks: Dict[str, LemmaCheck] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    def summary(self) -> str:
        lines = []
        for name, check in self.checks.items():
            status = "ok" if check.passed else "FAIL"
            lines.append(f"{name:<22} {status:<4} checked={check.checked} failed={len(check.failures)}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            name: {"checked": check.checked, "failures": [list(wit) for wit in check.failures]}
            for name, check in self.checks.items()
        }


LEMMA_NAMES = (
    "face_closure",
    "three_loops",
    "triangle_pure_edge",
    "tetrahedron_shape",
    "pure_edge_tetrahedra",
    "exposed_faces",
    "dimension_bound",
)


def verify_structure_lemmas(nerve: NerveComplex) -> LemmaReport:
    """
    Check the structural properties every bi-secondary loop nerve satisfies.

    Failures are recorded with the offending simplex (or backbone vertex) as
    witness; a failure on valid input means an implementation bug.
    """
    report = LemmaReport({name: LemmaCheck(name) for name in LEMMA_NAMES})
    checks = report.checks

    for simplex in nerve.simplices():
        if simplex.dim > 0:
            ok = True
            for face in simplex.faces():
                stored = nerve.index.get(face)
                ok = ok and stored is not None and set(simplex.intersection) <= set(stored.intersection)
            checks["face_closure"].record(ok, simplex.vertices)
        owners = [nerve.owner(idx) for idx in simplex.vertices]
        ok = max(owners.count(OWNER_S), owners.count(OWNER_T)) <= 2
        if simplex.dim == 1 and nerve.is_pure(simplex):
            ok = ok and simplex.weight == 2
        checks["three_loops"].record(ok, simplex.vertices)

    for simplex in nerve.K(2):
        pure_edges = sum(1 for face in simplex.faces() if nerve.is_pure(nerve.index[face]))
        checks["triangle_pure_edge"].record(pure_edges == 1 and simplex.weight <= 2, simplex.vertices)

    for simplex in nerve.K(3):
        owners = sorted(nerve.owner(idx) for idx in simplex.vertices)
        pure_edges = sum(1 for pair in itertools.combinations(simplex.vertices, 2) if nerve.is_pure(nerve.index[pair]))
        ok = owners == [OWNER_S, OWNER_S, OWNER_T, OWNER_T] and pure_edges == 2 and simplex.weight <= 2
        checks["tetrahedron_shape"].record(ok, simplex.vertices)
        checks["exposed_faces"].record(len(exposed_2faces(simplex, nerve)) >= 2, simplex.vertices)

    tetrahedra_per_edge: Dict[Vertices, int] = defaultdict(int)
    for simplex in nerve.K(3):
        for pair in itertools.combinations(simplex.vertices, 2):
            tetrahedra_per_edge[pair] += 1
    for edge in nerve.K(1):
        if nerve.is_pure(edge):
            checks["pure_edge_tetrahedra"].record(tetrahedra_per_edge[edge.vertices] <= 2, edge.vertices)

    for vertex, members in enumerate(nerve.incidence):
        owners = [nerve.owner(idx) for idx in members]
        ok = 1 <= owners.count(OWNER_S) <= 2 and 1 <= owners.count(OWNER_T) <= 2
        checks["dimension_bound"].record(ok, (vertex,))
    for simplex in itertools.chain.from_iterable(nerve.strata[4:]):
        checks["dimension_bound"].record(False, simplex.vertices)

    return report
