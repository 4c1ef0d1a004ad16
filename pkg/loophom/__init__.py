# Copyright: Multiple Authors
#
# This file is part of loophom.
#
# SPDX-License-Identifier: LGPL-3.0-or-later

# version of this python module
__version__ = "0.1.0"
# version of the report and pair JSON schemas
__schema_version__ = "1.0.0"

from . import bisfile, error, experiments, filtration, homology, nerve, oracle, schema, smith, structures, validate
from .filtration import filtered_complex, persistence_spectrum
from .homology import boundary_matrices, euler_characteristic, generator_support, h2_generators, homology
from .nerve import build_nerve, simplicial_order, verify_structure_lemmas
from .structures import BiSecondaryStructure, SecondaryStructure, parse_dot_bracket, validate_arcs
