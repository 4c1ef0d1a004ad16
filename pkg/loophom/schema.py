# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

"""Schema IO"""

import functools
import json
from pathlib import Path

SCHEMA_PAIR = "schema-pair.json"
SCHEMA_REPORT = "schema-report.json"


@functools.lru_cache(maxsize=None)
def get_schema(schema_file=SCHEMA_PAIR):
    """
    Load the JSON Schema of either an arc-list pair document or a homology report.
    """
    schema_dir = Path(__file__).parent
    with open(schema_dir / schema_file, "rb") as handle:
        schema = json.load(handle)
    return schema
