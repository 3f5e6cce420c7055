"""Verify growing prefixes of a synthetic dataset and plot timings."""

# %%
import csv
import io

import numpy as np

from dsverif import (SolverConfig, builtin_balanced, builtin_coverage_array,
                     builtin_min_cardinality, builtin_minmax_normalized, synthetic_dataset)
from dsverif.verifier import incremental_verify, series_csv

ds = synthetic_dataset(118, 2, seed=0)
spec = [builtin_min_cardinality(100), builtin_minmax_normalized(-1, 1),
        builtin_balanced(2),
        # this one only ends at its deadline, so keep the deadline short
        builtin_coverage_array(1, -1, 1).with_timeout(1.5)]

series = incremental_verify(ds, spec, SolverConfig(timeout=30), step=10, name="synthetic")
text = series_csv(series)
print(text)

# %%
# verdict table: rows are prefixes, columns are properties
rows = list(csv.DictReader(io.StringIO(text)))
sizes = sorted({int(r["m"]) for r in rows})
names = [p.name for p in spec]
secs = np.array([[float(r["seconds"]) for r in rows if int(r["m"]) == k] for k in sizes])
for k, line in zip(sizes, secs):
    print(f"{k:4d}", "  ".join(f"{s:6.2f}" for s in line))

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    for j, name in enumerate(names):
        plt.plot(sizes, secs[:, j], marker="o", label=name)
    plt.xlabel("rows")
    plt.ylabel("seconds")
    plt.legend()
    plt.savefig("sweep.png", dpi=100)
