"""Check the example dataset against a handful of properties.

Needs a z3 executable on PATH (``pip install z3-solver`` provides one).
"""

# %%
from pathlib import Path

from dsverif import (SolverConfig, builtin_balanced, builtin_coverage_array,
                     builtin_coverage_expanded, builtin_min_cardinality,
                     builtin_minmax_normalized, builtin_no_contradictions,
                     coverage_grid_search, load_example, load_property_file)
from dsverif.properties import read_params_file
from dsverif.verifier import verify

ds = load_example()
cfg = SolverConfig(timeout=10)

# %%
# The built-ins. Each one is checked in its own solver process:
# sat means the dataset holds the property, unsat means it is violated.
spec = [
    builtin_min_cardinality(100),       # only 10 rows, so violated
    builtin_minmax_normalized(-1, 1),   # all values inside [-1, 1]
    builtin_balanced(2),                # labels 1 and 0 occur once each
    builtin_no_contradictions(),        # no duplicate rows with different labels
]
print(verify(ds, spec, cfg, name="fixture").to_text())

# %%
# Coverage, two ways. The array form quantifies over a witness point and
# the solver gives up (here: by deadline). The expanded form names the
# point's coordinates and one distance per row, and is decided quickly.
coverage = [builtin_coverage_array(1, -1, 1).with_timeout(3),
            builtin_coverage_expanded(1, -1, 1)]
print(verify(ds, coverage, cfg).to_text())

# The grid search finds the point farthest from every row.
best, point = coverage_grid_search(ds, -1, 1)
print(f"max over the grid of the squared distance to the nearest row: {best:.4f} at {point}")

# %%
# Property files: plain SMT-LIB over m, n, l, D, O, L plus parameters.
here = Path(__file__).parent / "properties"
params = read_params_file(here / "params.txt")
files = [load_property_file(p, params) for p in sorted(here.glob("*.smt2"))]
report = verify(ds, files, cfg, name="fixture")
print(report.to_csv())
