# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Provides pytest fixtures for other tests."""

import tempfile
from pathlib import Path

import pytest

from loophom.nerve import build_nerve
from loophom.structures import BiSecondaryStructure

from .testdata import EMPTY, NESTED, RIBOSWITCH, TETRAHEDRON


@pytest.fixture
def tetrahedron_pair():
    """smallest pair with a crossing"""
    return BiSecondaryStructure.from_dot_bracket(*TETRAHEDRON)


@pytest.fixture
def tetrahedron_nerve(tetrahedron_pair):
    """nerve of the smallest crossing pair: the boundary of a tetrahedron"""
    return build_nerve(tetrahedron_pair)


@pytest.fixture
def empty_nerve():
    """nerve of two empty structures: one edge"""
    return build_nerve(BiSecondaryStructure.from_dot_bracket(*EMPTY))


@pytest.fixture
def corpus_dir():
    """when called, yields a temporary directory of .bis files"""
    with tempfile.TemporaryDirectory() as temp:
        path = Path(temp)
        for name, (s_line, t_line) in {"a": TETRAHEDRON, "b": NESTED, "c": RIBOSWITCH}.items():
            (path / f"{name}.bis").write_text(f"{s_line}\n{t_line}\n")
        yield path
