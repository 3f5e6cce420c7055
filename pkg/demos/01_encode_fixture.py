"""Encode the 10-row example dataset and look at the SMT-LIB it turns into."""

# %%
import numpy as np

from dsverif import encode_dataset, distinct_labels, load_example, render

ds = load_example()
ds.m, ds.n                      # 10 rows, 2 features
X = ds.features_array()         # float view, only for looking at the data
y = ds.outputs_array()
print("feature ranges:", X.min(axis=0), X.max(axis=0))
print("label counts:", dict(zip(*np.unique(y, return_counts=True))))

# %%
# Values are kept as Decimals, so the script says exactly what the CSV said.
ds.rows[1]                      # (Decimal('-0.092742'), Decimal('0.68494'))
distinct_labels(ds).labels      # first-occurrence order: 1, 0, -1

# %%
script = encode_dataset(ds)
text = render(script)
print(text[:600])
print("...")
print(f"{len(script.declarations)} declarations, {len(script.assertions)} assertions")

# %%
# Negative numbers are written (- x); SMT-LIB has no negative literals.
[a for a in script.assertions if "(- " in a][:3]
