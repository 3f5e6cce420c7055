"""Catch a specification that no dataset can satisfy, before running it."""

# %%
from dsverif import (SolverConfig, builtin_min_cardinality, builtin_minmax_normalized,
                     parse_property_text)
from dsverif.verifier import check_consistency

cfg = SolverConfig(timeout=10)

# %%
# Two requirements written by different people
more_than_30 = parse_property_text("(assert (> m 30))", name="more_than_30")
at_most_20 = parse_property_text("(assert (<= m 20))", name="at_most_20")
print(check_consistency([more_than_30, at_most_20], cfg=cfg).to_text())

# %%
# A reasonable pair
print(check_consistency([builtin_min_cardinality(10), builtin_minmax_normalized(-1, 1)],
                        cfg=cfg).to_text())

# %%
# Pairs are not the whole story: each pair below can be met, all three cannot.
spec = [parse_property_text("(assert (or (= m 1) (= m 2)))", name="a"),
        parse_property_text("(assert (or (= m 2) (= m 3)))", name="b"),
        parse_property_text("(assert (or (= m 1) (= m 3)))", name="c")]
print(check_consistency(spec, cfg=cfg, full=True).to_text())
