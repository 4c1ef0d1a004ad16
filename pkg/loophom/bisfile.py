# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Reading structure pairs and writing complexes, loop tables, bars and reports."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, TextIO

from . import validate
from .error import LoopHomFileError, LoopHomParseError
from .filtration import Bar, FilteredHomology
from .homology import TOP_DIM, HomologyResult, generator_support
from .nerve import NerveComplex, SimplicialOrder
from .structures import BiSecondaryStructure, validate_arcs

log = logging.getLogger()

BIS_EXT = ".bis"
JSON_EXT = ".json"
PAIR_EXTS = [BIS_EXT, JSON_EXT]


def parse_bis(text: str) -> BiSecondaryStructure:
    """
    Parse the two-line dot-bracket format: line 1 is S, line 2 is T.

    Trailing whitespace is stripped and lines after the second are ignored.

    Example
    -------
    >>> parse_bis("(.).\\n.(.)\\n# anything").T.to_dot_bracket()
    '.(.)'
    """
    lines = [line.rstrip() for line in text.splitlines()[:2]]
    for number in (1, 2):
        if len(lines) < number or not lines[number - 1]:
            raise LoopHomParseError("expected two non-empty structure lines", line=number)
    return BiSecondaryStructure.from_dot_bracket(lines[0], lines[1])


def parse_pair_document(document: dict) -> BiSecondaryStructure:
    """Build a pair from an arc-list document {"n", "s_arcs", "t_arcs"} with 1-based positions."""
    validate.validate_pair(document)
    n = document["n"]
    return BiSecondaryStructure(validate_arcs(n, document["s_arcs"]), validate_arcs(n, document["t_arcs"]))


def read_pair(path) -> BiSecondaryStructure:
    """
    Read a structure pair from a ``.bis`` or arc-list ``.json`` file.

    Raises
    ------
    LoopHomFileError
        Unknown file extension.
    LoopHomParseError
        Malformed content; carries line and column where known.
    jsonschema.exceptions.ValidationError
        A JSON document not matching the pair schema.
    """
    path = Path(path)
    ext = path.suffix.lower()
    if ext not in PAIR_EXTS:
        raise LoopHomFileError(f"unknown pair file extension {ext!r}, expected one of {PAIR_EXTS}")
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as err:
        line = raw.count(b"\n", 0, err.start) + 1
        column = err.start - raw.rfind(b"\n", 0, err.start)
        raise LoopHomParseError(f"invalid UTF-8 byte {raw[err.start]:#04x}", line, column) from err
    if ext == BIS_EXT:
        return parse_bis(text)
    try:
        document = json.loads(text)
    except json.decoder.JSONDecodeError as err:
        raise LoopHomParseError(f"invalid JSON: {err.msg}", err.lineno, err.colno) from err
    return parse_pair_document(document)


def write_pair(path, pair: BiSecondaryStructure) -> None:
    """Write a pair as a ``.bis`` file."""
    Path(path).write_text(f"{pair.S.to_dot_bracket()}\n{pair.T.to_dot_bracket()}\n")
    log.info("wrote pair n=%d to %s", pair.n, path)


def dump_complex(nerve: NerveComplex, fp: TextIO, order: Optional[SimplicialOrder] = None) -> int:
    """
    Write one simplex per line as ``d w v0 v1 ...`` with vertices in simplicial order.

    Returns the number of lines written.
    """
    order = order if order is not None else nerve.order
    lines = 0
    for dim in range(TOP_DIM + 1):
        oriented = sorted(
            ((order.sort(simplex.vertices), simplex.weight) for simplex in nerve.K(dim)),
            key=lambda item: [order.rank[idx] for idx in item[0]],
        )
        for verts, weight in oriented:
            fp.write(" ".join(str(value) for value in (dim, weight) + verts) + "\n")
            lines += 1
    return lines


def loop_table(nerve: NerveComplex) -> List[dict]:
    return [
        {
            "id": idx,
            "owner": lp.owner,
            "max_arc": lp.max_arc.as_list(),
            "intervals": [list(interval) for interval in lp.intervals],
        }
        for idx, lp in enumerate(nerve.loops)
    ]


def dump_loops(nerve: NerveComplex, fp: TextIO) -> None:
    """Write the loop table as a JSON array of {id, owner, max_arc, intervals}."""
    json.dump(loop_table(nerve), fp, indent=4)
    fp.write("\n")


def dump_bars(bars: Dict[int, List[Bar]], fp: TextIO) -> None:
    """Write bars as ``dim t_birth t_death`` lines."""
    for dim in sorted(bars):
        for birth, death in bars[dim]:
            fp.write(f"{dim} {birth} {death}\n")


def homology_report(
    nerve: NerveComplex, result: HomologyResult, spectrum: Optional[FilteredHomology] = None
) -> dict:
    """Homology of a nerve as a JSON-ready document; see ``schema-report.json``."""
    report = {
        "n": nerve.n,
        "counts": list(nerve.counts()),
        "betti": list(result.betti),
        "torsion": [list(factors) for factors in result.torsion],
        "h2_rank": result.h2_rank,
        "euler": result.euler,
        "generators": [
            [{"simplex": list(verts), "coeff": coeff} for verts, coeff in sorted(chain.items())]
            for chain in result.h2_generators
        ],
        "supports": [generator_support(chain, nerve).to_dict() for chain in result.h2_generators],
        "levels": {},
        "bars": {},
    }
    if spectrum is not None:
        report.update(spectrum.to_dict())
    return report


def dump_report(report: dict, fp: TextIO) -> None:
    """Validate and write a homology report."""
    validate.validate_report(report)
    json.dump(report, fp, indent=4, sort_keys=True)
    fp.write("\n")
