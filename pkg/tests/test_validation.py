# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Tests for Validator"""

import io
import json
import tempfile
import unittest
from pathlib import Path

from jsonschema.exceptions import ValidationError

import loophom
from loophom import bisfile
from loophom.homology import boundary_matrices, homology
from loophom.validate import validate_pair, validate_report

from .testdata import NESTED, TETRAHEDRON


def tetrahedron_report():
    nerve = loophom.build_nerve(loophom.BiSecondaryStructure.from_dot_bracket(*TETRAHEDRON))
    return bisfile.homology_report(nerve, homology(boundary_matrices(nerve)), loophom.persistence_spectrum(nerve))


def test_valid_pair():
    """assure a well-formed arc-list document is OK"""
    validate_pair({"n": 0, "s_arcs": [], "t_arcs": []})
    validate_pair({"n": 6, "s_arcs": [[1, 6], [2, 5]], "t_arcs": [[3, 4]]})


def test_valid_report():
    validate_report(tetrahedron_report())


class CommandLineValidator(unittest.TestCase):
    """Check behavior of command-line parser"""

    def setUp(self):
        """Create a directory with some valid files"""
        self.tmp_dir = tempfile.TemporaryDirectory()
        self.tmp_path = tmp_path = Path(self.tmp_dir.name)
        (tmp_path / "a.bis").write_text("\n".join(TETRAHEDRON) + "\n")
        (tmp_path / "b.bis").write_text("\n".join(NESTED) + "\n")
        (tmp_path / "c.json").write_text(json.dumps({"n": 4, "s_arcs": [[1, 3]], "t_arcs": []}))
        buf = io.StringIO()
        bisfile.dump_report(tetrahedron_report(), buf)
        (tmp_path / "report.out").write_text(buf.getvalue())

    def tearDown(self):
        """cleanup"""
        self.tmp_dir.cleanup()

    def test_normal(self):
        """able to parse .bis and .json pairs"""
        args = (str(self.tmp_path / "*.bis"), str(self.tmp_path / "*.json"))
        loophom.validate.main(args)

    def test_report(self):
        args = (str(self.tmp_path / "report.out"), "--report")
        loophom.validate.main(args)

    def test_partial(self):
        """checks some but not all files"""
        (self.tmp_path / "d.bis").write_text("(.)(\n....\n")
        args = (str(self.tmp_path / "*.bis"),)
        with self.assertRaises(SystemExit):
            loophom.validate.main(args)

    def test_undecodable(self):
        """a file that is not UTF-8 counts as invalid"""
        (self.tmp_path / "d.bis").write_bytes(b"(\xff).\n.(.)\n")
        args = (str(self.tmp_path / "*.bis"),)
        with self.assertRaises(SystemExit):
            loophom.validate.main(args)

    def test_report_as_pair(self):
        """a report is not a pair file"""
        args = (str(self.tmp_path / "report.out"),)
        with self.assertRaises(SystemExit):
            loophom.validate.main(args)

    def test_none(self):
        """checks no files"""
        with self.assertRaises(SystemExit):
            loophom.validate.main((str(self.tmp_path / "*.nothing"),))


class FailingCases(unittest.TestCase):
    """Cases where the validator should throw an exception."""

    def setUp(self):
        self.report = tetrahedron_report()

    def test_extra_pair_key(self):
        with self.assertRaises(ValidationError):
            validate_pair({"n": 4, "s_arcs": [], "t_arcs": [], "u_arcs": []})

    def test_reversed_arc(self):
        with self.assertRaises(ValidationError):
            validate_pair({"n": 4, "s_arcs": [], "t_arcs": [[4, 2]]})

    def test_short_arc(self):
        with self.assertRaises(ValidationError):
            validate_pair({"n": 4, "s_arcs": [[1]], "t_arcs": []})

    def test_rank_disagrees_with_betti(self):
        self.report["h2_rank"] = 0
        with self.assertRaises(ValidationError):
            validate_report(self.report)

    def test_missing_generator(self):
        self.report["generators"] = []
        with self.assertRaises(ValidationError):
            validate_report(self.report)

    def test_zero_coefficient(self):
        self.report["generators"][0][0]["coeff"] = 0
        with self.assertRaises(ValidationError):
            validate_report(self.report)

    def test_bad_level_key(self):
        self.report["levels"]["0"] = [1, 0, 0, 0]
        with self.assertRaises(ValidationError):
            validate_report(self.report)

    def test_missing_betti(self):
        del self.report["betti"]
        with self.assertRaises(ValidationError):
            validate_report(self.report)
