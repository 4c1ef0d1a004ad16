# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Secondary structures: parsing, validation, arc poset, loops, gaps and uniform sampling."""

import functools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .error import (
    CrossingArcs,
    DuplicateEndpoint,
    InvalidCharacter,
    LengthMismatch,
    OutOfRange,
    UnbalancedBrackets,
)

OWNER_S = "S"
OWNER_T = "T"
OWNERS = (OWNER_S, OWNER_T)

Interval = Tuple[int, int]


@dataclass(frozen=True, order=True)
class Arc:
    """
    A base pair (start, end) on the backbone, start < end.

    In the usual notation b(r) = start and e(r) = end for the maximal arc of a loop r.
    """

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.start >= self.end:
            raise OutOfRange(f"arc ({self.start}, {self.end}) needs 0 <= start < end", column=self.start)

    def crosses(self, other: "Arc") -> bool:
        """True if the two arcs cross, i.e. i < p < j < q in either order."""
        first, second = sorted((self, other))
        return first.start < second.start < first.end < second.end

    def encloses(self, other: "Arc") -> bool:
        """True if `other` precedes `self` in the arc poset (strict nesting)."""
        return self.start < other.start and other.end < self.end

    def as_list(self) -> List[int]:
        return [self.start, self.end]


@dataclass(frozen=True)
class SecondaryStructure:
    """
    A non-crossing arc set over the backbone [0, n+1].

    `arcs` holds the non-rainbow arcs sorted by start position; the rainbow (0, n+1)
    is implicit and always present. Instances are built by `parse_dot_bracket`,
    `validate_arcs` or `sample_uniform`, which guarantee the invariants.
    """

    n: int
    arcs: Tuple[Arc, ...] = ()

    @property
    def rainbow(self) -> Arc:
        return Arc(0, self.n + 1)

    @property
    def all_arcs(self) -> Tuple[Arc, ...]:
        """Rainbow followed by the other arcs in order of start position."""
        return (self.rainbow,) + self.arcs

    @functools.cached_property
    def partners(self) -> Tuple[int, ...]:
        """Partner table over positions 0..n+1; -1 for unpaired positions."""
        table = [-1] * (self.n + 2)
        for arc in self.all_arcs:
            table[arc.start] = arc.end
            table[arc.end] = arc.start
        return tuple(table)

    def to_dot_bracket(self) -> str:
        """
        Render positions 1..n as a dot-bracket string.

        Example
        -------
        >>> validate_arcs(4, [(1, 3)]).to_dot_bracket()
        '(.).'
        """
        chars = ["."] * self.n
        for arc in self.arcs:
            chars[arc.start - 1] = "("
            chars[arc.end - 1] = ")"
        return "".join(chars)


@dataclass(frozen=True)
class ArcPoset:
    """
    The arc poset of one secondary structure and its Hasse diagram Tr(S).

    `covers` maps every non-rainbow arc to the unique arc immediately covering it;
    the rainbow is the root.
    """

    elements: Tuple[Arc, ...]
    covers: Dict[Arc, Arc] = field(compare=False)

    @property
    def root(self) -> Arc:
        return self.elements[0]

    def parent(self, arc: Arc) -> Optional[Arc]:
        return self.covers.get(arc)

    def children(self, arc: Arc) -> Tuple[Arc, ...]:
        """Arcs immediately covered by `arc`, left to right."""
        return tuple(child for child in self.elements[1:] if self.covers[child] == arc)

    @staticmethod
    def precedes(lower: Arc, upper: Arc) -> bool:
        """(k, l) precedes (i, j) iff i < k < l < j."""
        return upper.encloses(lower)


@dataclass(frozen=True)
class Loop:
    """
    A loop: disjoint backbone blocks [a_1, b_1], ..., [a_k, b_k] listed left to right,
    identified with its maximal arc (a_1, b_k) and tagged with its owner structure.
    """

    intervals: Tuple[Interval, ...]
    max_arc: Arc
    owner: str = OWNER_S

    @functools.cached_property
    def vertices(self) -> frozenset:
        return frozenset(pos for start, end in self.intervals for pos in range(start, end + 1))

    @property
    def size(self) -> int:
        return sum(end - start + 1 for start, end in self.intervals)

    def __contains__(self, position: int) -> bool:
        return any(start <= position <= end for start, end in self.intervals)


@dataclass(frozen=True)
class Gap:
    """A gap of a loop: the backbone interval before, between or after its blocks."""

    interval: Interval
    kind: str
    index: int

    EXTERIOR = "exterior"
    INTERIOR = "interior"


@dataclass(frozen=True)
class BiSecondaryStructure:
    """A pair R = (S, T) of secondary structures on a common backbone."""

    S: SecondaryStructure
    T: SecondaryStructure

    def __post_init__(self):
        if self.S.n != self.T.n:
            raise LengthMismatch(f"structures have lengths {self.S.n} and {self.T.n}", line=2)

    @property
    def n(self) -> int:
        return self.S.n

    @classmethod
    def from_dot_bracket(cls, s_line: str, t_line: str) -> "BiSecondaryStructure":
        s_struct = parse_dot_bracket(s_line, line_number=1)
        t_struct = parse_dot_bracket(t_line, line_number=2)
        return cls(s_struct, t_struct)

    def structure(self, owner: str) -> SecondaryStructure:
        return self.S if owner == OWNER_S else self.T


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of the uniform sampler."""

    n: int
    min_gap: int = 0
    seed: int = 42

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.min_gap < 0:
            raise ValueError(f"min_gap must be >= 0, got {self.min_gap}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def parse_dot_bracket(line: str, line_number: Optional[int] = None) -> SecondaryStructure:
    """
    Parse a dot-bracket string into a secondary structure over positions 1..len(line).

    Parameters
    ----------
    line : str
        Characters '(', ')' and '.' only.
    line_number : int, optional
        Reported in errors when parsing a multi-line file.

    Raises
    ------
    InvalidCharacter
        On any other character.
    UnbalancedBrackets
        On a ')' without partner or an unclosed '('.

    Example
    -------
    >>> parse_dot_bracket("(.).").arcs
    (Arc(start=1, end=3),)
    """
    stack = []
    arcs = []
    for pos, char in enumerate(line, start=1):
        if char == "(":
            stack.append(pos)
        elif char == ")":
            if not stack:
                raise UnbalancedBrackets(f"')' at position {pos} has no open partner", line_number, pos)
            arcs.append(Arc(stack.pop(), pos))
        elif char != ".":
            raise InvalidCharacter(f"invalid character {char!r} at position {pos}", line_number, pos)
    if stack:
        raise UnbalancedBrackets(f"unclosed '(' at position {stack[-1]} at end of structure", line_number, stack[-1])
    return SecondaryStructure(len(line), tuple(sorted(arcs)))


def validate_arcs(n: int, arcs: Sequence) -> SecondaryStructure:
    """
    Build a secondary structure from an arc list, enforcing the non-crossing condition.

    Parameters
    ----------
    n : int
        Sequence length.
    arcs : sequence of Arc or (int, int)
        1-based arcs; the rainbow is implicit and must not be listed.

    Raises
    ------
    OutOfRange
        Endpoint outside 1..n, or start >= end.
    DuplicateEndpoint
        A position used by two arcs.
    CrossingArcs
        Two arcs cross; reports the pair.
    """
    if n < 0:
        raise OutOfRange(f"length must be >= 0, got {n}")
    checked = []
    for item in arcs:
        start, end = (item.start, item.end) if isinstance(item, Arc) else item
        if not (1 <= start < end <= n):
            raise OutOfRange(f"arc ({start}, {end}) outside 1..{n}", column=start)
        checked.append(Arc(start, end))

    owner_of: Dict[int, Arc] = {}
    for arc in checked:
        for pos in (arc.start, arc.end):
            if pos in owner_of:
                first = (owner_of[pos].start, owner_of[pos].end)
                raise DuplicateEndpoint(
                    f"position {pos} is an endpoint of {first} and {(arc.start, arc.end)}", column=pos
                )
            owner_of[pos] = arc

    # sweep: every closing endpoint must close the innermost open arc
    stack: List[Arc] = []
    for pos in sorted(owner_of):
        arc = owner_of[pos]
        if pos == arc.start:
            stack.append(arc)
        else:
            top = stack.pop()
            if top != arc:
                raise CrossingArcs((arc.start, arc.end), (top.start, top.end), column=top.start)
    return SecondaryStructure(n, tuple(sorted(checked)))


def arc_poset(structure: SecondaryStructure) -> ArcPoset:
    """
    Hasse diagram of the arc poset: each non-rainbow arc points to its least strict enclosure.

    Example
    -------
    >>> poset = arc_poset(validate_arcs(4, [(1, 4), (2, 3)]))
    >>> poset.parent(Arc(2, 3)), poset.parent(Arc(1, 4))
    (Arc(start=1, end=4), Arc(start=0, end=5))
    """
    covers = {}
    stack = [structure.rainbow]
    partners = structure.partners
    for pos in range(1, structure.n + 1):
        partner = partners[pos]
        if partner > pos:
            arc = Arc(pos, partner)
            covers[arc] = stack[-1]
            stack.append(arc)
        elif 0 <= partner < pos:
            stack.pop()
    return ArcPoset(structure.all_arcs, covers)


def _loop_of(arc: Arc, children: Sequence[Arc], owner: str) -> Loop:
    cuts = [arc.start]
    for child in children:
        cuts.extend((child.start, child.end))
    cuts.append(arc.end)
    intervals = tuple((cuts[idx], cuts[idx + 1]) for idx in range(0, len(cuts), 2))
    return Loop(intervals, arc, owner)


def loops(structure: SecondaryStructure, owner: str = OWNER_S) -> List[Loop]:
    """
    Loop decomposition: exactly one loop per arc, rainbow first, then by start position.

    Example
    -------
    >>> [lp.intervals for lp in loops(validate_arcs(4, [(1, 3)]))]
    [((0, 1), (3, 5)), ((1, 3),)]
    """
    poset = arc_poset(structure)
    children: Dict[Arc, List[Arc]] = {arc: [] for arc in poset.elements}
    for arc in poset.elements[1:]:
        children[poset.covers[arc]].append(arc)
    return [_loop_of(arc, children[arc], owner) for arc in poset.elements]


def loop_gaps(loop: Loop, n: int) -> List[Gap]:
    """
    The k+1 gaps of a k-block loop; the first and the last are exterior.

    Example
    -------
    >>> lp = Loop(((4, 5), (11, 14), (18, 19)), Arc(4, 19))
    >>> [gap.interval for gap in loop_gaps(lp, 21)]
    [(0, 4), (5, 11), (14, 18), (19, 22)]
    """
    bounds = [0]
    for start, end in loop.intervals:
        bounds.extend((start, end))
    bounds.append(n + 1)
    total = len(loop.intervals) + 1
    gaps = []
    for index in range(total):
        kind = Gap.EXTERIOR if index in (0, total - 1) else Gap.INTERIOR
        gaps.append(Gap((bounds[2 * index], bounds[2 * index + 1]), kind, index))
    return gaps


@functools.lru_cache(maxsize=None)
def structure_counts(n: int, min_gap: int = 0) -> Tuple[int, ...]:
    """
    Counts C(0..n) of non-crossing partial matchings with at least `min_gap`
    unpaired positions under every arc.
    """
    counts = [1] * (n + 1)
    for length in range(1, n + 1):
        total = counts[length - 1]
        # first position paired with position k of the segment
        for k in range(min_gap + 2, length + 1):
            total += counts[k - 2] * counts[length - k]
        counts[length] = total
    return tuple(counts)


def count_structures(n: int, min_gap: int = 0) -> int:
    """
    Number of secondary structures on n positions with hairpin constraint `min_gap`.

    Example
    -------
    >>> [count_structures(n) for n in range(5)]
    [1, 1, 2, 4, 9]
    >>> count_structures(5, min_gap=3)
    2
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return structure_counts(n, min_gap)[n]


def make_rng(seed: int, index: Optional[int] = None) -> np.random.Generator:
    """
    Random stream for a seed, or for instance `index` of a seeded batch.

    Streams for distinct indices are independent, so a batch gives identical
    results whether its instances run serially or in parallel.
    """
    spawn_key = () if index is None else (index,)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)))


def randbelow(rng: np.random.Generator, bound: int) -> int:
    """Exact uniform integer in [0, bound) for arbitrarily large `bound`."""
    if bound <= 0:
        raise ValueError(f"bound must be positive, got {bound}")
    if bound == 1:
        return 0
    nbits = (bound - 1).bit_length()
    nwords = (nbits + 63) // 64
    mask = (1 << nbits) - 1
    while True:
        value = 0
        for word in rng.bit_generator.random_raw(nwords):
            value = (value << 64) | int(word)
        value &= mask
        if value < bound:
            return value


def sample_uniform(cfg: SamplerConfig, rng: Optional[np.random.Generator] = None) -> SecondaryStructure:
    """
    Draw a structure exactly uniformly among the `count_structures(n, min_gap)` possibilities.

    Parameters
    ----------
    cfg : SamplerConfig
        Length, hairpin constraint and seed.
    rng : numpy.random.Generator, optional
        Stream to draw from; when omitted a fresh stream is derived from `cfg.seed`,
        so repeated calls with the same config return the same structure.
    """
    if rng is None:
        rng = make_rng(cfg.seed)
    counts = structure_counts(cfg.n, cfg.min_gap)
    arcs = []
    pending = [(1, cfg.n)]
    while pending:
        lo, length = pending.pop()
        while length > 0:
            draw = randbelow(rng, counts[length])
            if draw < counts[length - 1]:
                lo += 1
                length -= 1
                continue
            draw -= counts[length - 1]
            for k in range(cfg.min_gap + 2, length + 1):
                weight = counts[k - 2] * counts[length - k]
                if draw < weight:
                    arcs.append(Arc(lo, lo + k - 1))
                    pending.append((lo + 1, k - 2))
                    lo += k
                    length -= k
                    break
                draw -= weight
    return SecondaryStructure(cfg.n, tuple(sorted(arcs)))


def sample_pair(n: int, min_gap: int, rng: np.random.Generator) -> BiSecondaryStructure:
    """Two independent uniform structures from one stream, S first."""
    cfg = SamplerConfig(n, min_gap)
    return BiSecondaryStructure(sample_uniform(cfg, rng), sample_uniform(cfg, rng))
