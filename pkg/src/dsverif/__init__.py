"""Formal verification of structured ML datasets with an SMT solver."""

from .dataset import (Dataset, LabelSet, distinct_labels, dump_csv, from_values,
                      load_csv, load_example, synthetic_dataset)
from .encoder import SmtScript, encode_dataset, environment_script, render, serialize_real
from .properties import (Property, Schema, Specification, builtin_balanced,
                         builtin_coverage_array, builtin_coverage_expanded,
                         builtin_min_cardinality, builtin_minmax_normalized,
                         builtin_no_contradictions, coverage_grid_search,
                         load_property_file, parse_property_text)
from .solver import Outcome, SolverConfig, Verdict, check_sat, get_model
from .verifier import (ConsistencyMatrix, Report, RunStatus, check_consistency,
                       incremental_verify, series_csv, verify)

__version__ = "0.1.0"
