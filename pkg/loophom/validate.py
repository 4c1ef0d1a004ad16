# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""loophom Validator"""
import argparse
import glob
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Optional, Tuple

import jsonschema

from . import __version__ as toolversion
from . import bisfile, error, schema


def validate_pair(document, ref_schema=schema.get_schema(schema.SCHEMA_PAIR)) -> None:
    """
    Check that an arc-list pair `document` is valid according to `ref_schema`.

    Parameters
    ----------
    document : dict
        Parsed JSON pair document.
    ref_schema : dict, optional
        Schema of arc-list pair documents.

    Raises
    ------
    ValidationError
        If the document is invalid. Arcs with start >= end are rejected here;
        crossings and shared endpoints are left to the structure validator,
        which reports the offending arcs.
    """
    jsonschema.validators.validate(instance=document, schema=ref_schema)
    for key in ["s_arcs", "t_arcs"]:
        for start, end in document[key]:
            if start >= end:
                raise jsonschema.exceptions.ValidationError(f"{key} has arc [{start}, {end}] with start >= end.")


def validate_report(document, ref_schema=schema.get_schema(schema.SCHEMA_REPORT)) -> None:
    """
    Check that a homology report `document` is valid and self-consistent.

    Raises
    ------
    ValidationError
        If the document is invalid, or h2_rank disagrees with betti or the
        number of generators.
    """
    jsonschema.validators.validate(instance=document, schema=ref_schema)
    if document["h2_rank"] != document["betti"][2]:
        raise jsonschema.exceptions.ValidationError("h2_rank differs from betti[2].")
    if len(document["generators"]) != document["h2_rank"]:
        raise jsonschema.exceptions.ValidationError("number of generators differs from h2_rank.")


def _validate_single_file(filename, report: bool, logger: logging.Logger) -> int:
    """Validates a single pair or report file.

    Parameters
    ----------
    filename : str
        Path to a .bis / .json pair file, or to a report file.
    report : bool
        Treat the file as a homology report.
    logger : logging.Logger
        Logging object to log errors to.

    Returns
    -------
    rc : int
        0 if OK, 1 if err
    """
    try:
        if report:
            with open(filename, "r") as handle:
                validate_report(json.load(handle))
        else:
            bisfile.read_pair(filename)
    except (
        jsonschema.exceptions.ValidationError,
        error.LoopHomError,
        json.decoder.JSONDecodeError,
        UnicodeDecodeError,
        IOError,
    ) as err:
        logger.error(f"file `{filename}`: {err}")
        return 1
    else:
        return 0


def main(arg_tuple: Optional[Tuple[str, ...]] = None) -> None:
    """entry-point for command-line validator"""
    parser = argparse.ArgumentParser(
        description="Validate structure pair files or homology reports.", prog="loophom_validate"
    )
    parser.add_argument("path", nargs="*", help="File path(s). Accepts * wildcards.")
    parser.add_argument("--report", action="store_true", help="Validate homology report JSON instead of pairs.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--version", action="version", version=f"%(prog)s {toolversion}")

    # allow pass-in arg_tuple for testing purposes
    args = parser.parse_args(arg_tuple)

    level_lut = {
        0: logging.WARNING,
        1: logging.INFO,
        2: logging.DEBUG,
    }
    log = logging.getLogger()
    logging.basicConfig(level=level_lut[min(args.verbose, 2)])

    paths = []
    for path in args.path:
        paths += glob.glob(path)

    n_completed = 0
    n_total = len(paths)
    est_num_workers = len(os.sched_getaffinity(0)) if os.name == "posix" else os.cpu_count()
    with ThreadPoolExecutor(max_workers=est_num_workers) as executor:
        future_validations = {executor.submit(_validate_single_file, path, args.report, log) for path in paths}
        for future in as_completed(future_validations):
            if future.result() == 0:
                n_completed += 1

    if n_total == 0:
        log.error("No paths to validate.")
        sys.exit(1)
    elif n_completed != n_total:
        log.info(f"Validated {n_completed} of {n_total} files OK")
        sys.exit(1)
    else:
        log.info(f"Validated all {n_total} files OK!")


if __name__ == "__main__":
    main()
