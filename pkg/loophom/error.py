# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Defines loophom exception classes."""

from typing import Optional, Sequence, Tuple


class LoopHomError(Exception):
    """loophom base exception."""


class LoopHomParseError(LoopHomError):
    """Exceptions related to malformed structure input.

    Parameters
    ----------
    message : str
        Human readable description.
    line : int, optional
        1-based input line, if known.
    column : int, optional
        1-based column (backbone position for dot-bracket input), if known.
    """

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def __str__(self):
        where = []
        if self.line is not None:
            where.append(f"line {self.line}")
        if self.column is not None:
            where.append(f"column {self.column}")
        if where:
            return f"{', '.join(where)}: {self.message}"
        return self.message

    def __reduce__(self):
        return (self.__class__, (self.message, self.line, self.column))


class UnbalancedBrackets(LoopHomParseError):
    """A ')' without an open partner, or an unclosed '('."""


class InvalidCharacter(LoopHomParseError):
    """A character other than '(', ')' or '.' in dot-bracket input."""


class CrossingArcs(LoopHomParseError):
    """Two arcs (i, j), (p, q) with i < p < j < q."""

    def __init__(self, first: Tuple[int, int], second: Tuple[int, int], line=None, column=None):
        super().__init__(f"arcs {tuple(first)} and {tuple(second)} cross", line, column)
        self.first = tuple(first)
        self.second = tuple(second)

    def __reduce__(self):
        return (self.__class__, (self.first, self.second, self.line, self.column))


class DuplicateEndpoint(LoopHomParseError):
    """A position is the endpoint of more than one arc."""


class OutOfRange(LoopHomParseError):
    """An arc endpoint outside 1..n, or an arc with start >= end."""


class LengthMismatch(LoopHomParseError):
    """The two structures of a pair have different lengths."""


class LoopHomFileError(LoopHomError):
    """Exceptions related to reading or writing loophom files."""


class TheoremViolation(LoopHomError):
    """A homology theorem failed on an instance; always an implementation bug.

    Parameters
    ----------
    message : str
        What failed.
    dimension : int
        Homology dimension that violated the theorem.
    ranks : sequence of int
        Ranks of D1, D2, D3.
    betti : sequence of int, optional
        Betti numbers found.
    torsion : sequence of sequence of int, optional
        Torsion coefficients found.
    """

    def __init__(
        self,
        message: str,
        dimension: int,
        ranks: Sequence[int],
        betti: Optional[Sequence[int]] = None,
        torsion: Optional[Sequence[Sequence[int]]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.dimension = dimension
        self.ranks = tuple(ranks)
        self.betti = tuple(betti) if betti is not None else None
        self.torsion = tuple(tuple(tor) for tor in torsion) if torsion is not None else None

    def __str__(self):
        return f"{self.message} (dimension {self.dimension}, ranks {self.ranks}, betti {self.betti})"

    def __reduce__(self):
        return (self.__class__, (self.message, self.dimension, self.ranks, self.betti, self.torsion))
