"""
Which nodes earn the most?
==========================

Run a thresholded market on a small network, accumulate each intermediary's
payoff, and ask which path-weighting exponent alpha best explains it.
"""

import random

from tradenet import centrality, netgraph as ng
from tradenet.analysis import alpha_sweep
from tradenet.expt import ExperimentConfig, run_series
from tradenet.agents import PriceInitializer

g = ng.generate_ws(ng.NetworkSpec(12, 4, 0.3, 5)).with_terminals(0, 6)
inventory = centrality.enumerate_paths(g)
print(f"{len(inventory)} simple S-D paths")

# %%
# Path share, length-weighted share and shortest-path share per node.
for row in centrality.measures_table(g, [2.0], inventory):
    v, sd0, sd2, sd_inf = row
    print(f"node {v:2d}: sd0={sd0:.3f} sd_alpha(2)={sd2:.3f} sd_inf={sd_inf:.3f}")

# %%
# Accumulate payoffs over many short series with bootstrapped first prices.
cfg = ExperimentConfig(network="inline", rounds=15, initializer=PriceInitializer.bootstrap())
payoff = {v: 0.0 for v in g.intermediaries()}
for seed in range(200):
    log = run_series(g, cfg, random.Random(seed))
    for out in log.outcomes:
        for v in g.intermediaries():
            payoff[v] += out.payoffs[v]

sweep = alpha_sweep(g, payoff, inventory=inventory)
print(f"best alpha on the grid: {sweep.best_alpha} (R^2={sweep.r_squared.max():.3f})")
print(f"R^2 at alpha=0: {sweep.r_squared[0]:.3f}, at alpha=50: {sweep.r_squared[-1]:.3f}")
