# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Smith normal form of integer matrices with exact arithmetic."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np


def identity(size: int) -> np.ndarray:
    """Identity matrix of Python ints."""
    eye = np.zeros((size, size), dtype=object)
    for idx in range(size):
        eye[idx, idx] = 1
    return eye


def as_integer_matrix(matrix) -> np.ndarray:
    """Copy `matrix` into a 2-D object array of Python ints."""
    arr = np.asarray(matrix)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    result = np.zeros(arr.shape, dtype=object)
    for (row, col), value in np.ndenumerate(arr):
        result[row, col] = int(value)
    return result


@dataclass(frozen=True, eq=False)
class SmithForm:
    """
    Result of `smith_normal_form`.

    Attributes
    ----------
    diag : tuple of int
        Nonzero invariant factors d_1 | d_2 | ..., all positive.
    shape : tuple of int
        Shape (m, n) of the input matrix.
    U, V : numpy.ndarray or None
        Unimodular transforms with U @ M @ V equal to the diagonal matrix.
    U_inv, V_inv : numpy.ndarray or None
        Their exact inverses.
    """

    diag: Tuple[int, ...]
    shape: Tuple[int, int]
    U: Optional[np.ndarray] = None
    V: Optional[np.ndarray] = None
    U_inv: Optional[np.ndarray] = None
    V_inv: Optional[np.ndarray] = None

    @property
    def rank(self) -> int:
        return len(self.diag)

    @property
    def torsion(self) -> Tuple[int, ...]:
        """Invariant factors greater than one."""
        return tuple(value for value in self.diag if value > 1)

    def matrix(self) -> np.ndarray:
        """The m x n diagonal matrix."""
        result = np.zeros(self.shape, dtype=object)
        for idx, value in enumerate(self.diag):
            result[idx, idx] = value
        return result


class _Reducer:
    """Row and column operations on A that keep U, V and their inverses in step."""

    def __init__(self, matrix: np.ndarray, transforms: bool):
        rows, cols = matrix.shape
        self.A = matrix
        self.transforms = transforms
        if transforms:
            self.U, self.U_inv = identity(rows), identity(rows)
            self.V, self.V_inv = identity(cols), identity(cols)

    def swap_rows(self, first: int, second: int) -> None:
        if first == second:
            return
        self.A[[first, second], :] = self.A[[second, first], :]
        if self.transforms:
            self.U[[first, second], :] = self.U[[second, first], :]
            self.U_inv[:, [first, second]] = self.U_inv[:, [second, first]]

    def swap_cols(self, first: int, second: int) -> None:
        if first == second:
            return
        self.A[:, [first, second]] = self.A[:, [second, first]]
        if self.transforms:
            self.V[:, [first, second]] = self.V[:, [second, first]]
            self.V_inv[[first, second], :] = self.V_inv[[second, first], :]

    def negate_row(self, row: int) -> None:
        self.A[row, :] = -self.A[row, :]
        if self.transforms:
            self.U[row, :] = -self.U[row, :]
            self.U_inv[:, row] = -self.U_inv[:, row]

    def add_row(self, target: int, source: int) -> None:
        """row[target] += row[source]"""
        self.A[target, :] = self.A[target, :] + self.A[source, :]
        if self.transforms:
            self.U[target, :] = self.U[target, :] + self.U[source, :]
            self.U_inv[:, source] = self.U_inv[:, source] - self.U_inv[:, target]

    def clear_column(self, pivot: int) -> None:
        """Subtract multiples of the pivot row from the rows below it."""
        quotients = self.A[pivot + 1 :, pivot] // self.A[pivot, pivot]
        if not quotients.any():
            return
        self.A[pivot + 1 :, pivot:] = self.A[pivot + 1 :, pivot:] - np.outer(quotients, self.A[pivot, pivot:])
        if self.transforms:
            self.U[pivot + 1 :, :] = self.U[pivot + 1 :, :] - np.outer(quotients, self.U[pivot, :])
            self.U_inv[:, pivot] = self.U_inv[:, pivot] + self.U_inv[:, pivot + 1 :].dot(quotients)

    def clear_row(self, pivot: int) -> None:
        """Subtract multiples of the pivot column from the columns right of it."""
        quotients = self.A[pivot, pivot + 1 :] // self.A[pivot, pivot]
        if not quotients.any():
            return
        self.A[pivot:, pivot + 1 :] = self.A[pivot:, pivot + 1 :] - np.outer(self.A[pivot:, pivot], quotients)
        if self.transforms:
            self.V[:, pivot + 1 :] = self.V[:, pivot + 1 :] - np.outer(self.V[:, pivot], quotients)
            self.V_inv[pivot, :] = self.V_inv[pivot, :] + quotients.dot(self.V_inv[pivot + 1 :, :])


def _least_entry(block: np.ndarray) -> Optional[Tuple[int, int]]:
    """Position of a nonzero entry of least absolute value, or None."""
    best, best_abs = None, None
    for row, col in zip(*np.nonzero(block != 0)):
        value = abs(block[row, col])
        if best is None or value < best_abs:
            best, best_abs = (int(row), int(col)), value
            if value == 1:
                break
    return best


def smith_normal_form(matrix, transforms: bool = True) -> SmithForm:
    """
    Smith normal form U @ M @ V = D of an integer matrix.

    Pivots are chosen with least absolute value in the remaining block, which
    keeps intermediate entries small; all arithmetic is on Python ints.

    Parameters
    ----------
    matrix : array_like
        Integer matrix of shape (m, n); not modified.
    transforms : bool, default True
        Track U, V and their inverses. Ranks and torsion need no transforms.

    Returns
    -------
    SmithForm

    Example
    -------
    >>> smith_normal_form([[2, 4], [6, 8]]).diag
    (2, 4)
    >>> smith_normal_form([[0, 0], [0, 0]]).rank
    0
    """
    work = as_integer_matrix(matrix)
    rows, cols = work.shape
    red = _Reducer(work, transforms)
    diag = []
    for pivot in range(min(rows, cols)):
        found = _least_entry(work[pivot:, pivot:])
        if found is None:
            break
        red.swap_rows(pivot, pivot + found[0])
        red.swap_cols(pivot, pivot + found[1])
        while True:
            red.clear_column(pivot)
            red.clear_row(pivot)
            # remainders smaller than the pivot move into the pivot position
            lead = np.concatenate((work[pivot:, pivot], work[pivot, pivot + 1 :]))
            nonzero = [(abs(value), idx) for idx, value in enumerate(lead) if value != 0]
            smallest, idx = min(nonzero)
            if len(nonzero) > 1:
                if idx < rows - pivot:
                    red.swap_rows(pivot, pivot + idx)
                else:
                    red.swap_cols(pivot, pivot + 1 + idx - (rows - pivot))
                continue
            if smallest == 1:
                break
            rest = work[pivot + 1 :, pivot + 1 :] % work[pivot, pivot]
            offending = np.argwhere(rest != 0)
            if not len(offending):
                break
            red.add_row(pivot, pivot + 1 + int(offending[0][0]))
        if work[pivot, pivot] < 0:
            red.negate_row(pivot)
        diag.append(work[pivot, pivot])

    if transforms:
        return SmithForm(tuple(diag), (rows, cols), red.U, red.V, red.U_inv, red.V_inv)
    return SmithForm(tuple(diag), (rows, cols))


def check_smith_form(matrix, form: SmithForm) -> None:
    """
    Verify a Smith form against its input; raise AssertionError on mismatch.

    Checks U @ M @ V = D, the divisibility chain, and U @ U_inv = I, V @ V_inv = I,
    so U and V are unimodular.
    """
    mat = as_integer_matrix(matrix)
    rows, cols = mat.shape
    for prev, cur in zip(form.diag, form.diag[1:]):
        if cur % prev:
            raise AssertionError(f"divisibility chain broken: {prev} does not divide {cur}")
    if any(value <= 0 for value in form.diag):
        raise AssertionError(f"invariant factors must be positive: {form.diag}")
    if form.U is None:
        return
    if rows and cols and not np.array_equal(form.U.dot(mat).dot(form.V), form.matrix()):
        raise AssertionError("U @ M @ V is not the Smith form")
    if not np.array_equal(form.U.dot(form.U_inv), identity(rows)):
        raise AssertionError("U is not unimodular")
    if not np.array_equal(form.V.dot(form.V_inv), identity(cols)):
        raise AssertionError("V is not unimodular")
