"""
Long-run cost, competition and path length
==========================================

Threshold-free runs from zero prices.  Cost vanishes once four disjoint
routes compete; below that it grows with the average path length.
"""

from collections import defaultdict

import numpy as np

from tradenet import analysis, expt

records = expt.longrun_ensemble(networks_per_config=45, rounds=500, seed=3)

by_M = defaultdict(list)
for r in records:
    by_M[min(r.M, 4)].append(r.final_cost)
for m in sorted(by_M):
    label = f"M={m}" if m < 4 else "M>=4"
    print(f"{label:5s} networks={len(by_M[m]):3d} mean final cost={np.mean(by_M[m]):10.1f}")

# %%
# M-specific standardized slopes on clustering and on path length.
sub = analysis.restrict_M(records)
models = {"Clustering": analysis.cost_regression(sub, "clustering"),
          "Path length": analysis.cost_regression(sub, "apl")}
print(analysis.format_regression_table(models))
