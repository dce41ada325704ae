"""
Small-world networks and competition between routes
===================================================

Generate Watts-Strogatz networks at a few rewiring probabilities and look at
the structural quantities the market cares about.
"""

import random

import numpy as np

from tradenet import netgraph as ng
from tradenet.expt import choose_sd_pair, default_sd_offset

# %%
# A ring lattice (p=0) is highly clustered and has long paths.  A little
# rewiring keeps the clustering but shortens paths sharply.
for p in (0.0, 0.01, 0.1, 1.0):
    graphs = [ng.generate_ws(ng.NetworkSpec(50, 4, p, seed)) for seed in range(20)]
    apl = np.mean([ng.average_path_length(g) for g in graphs])
    cc = np.mean([ng.clustering_coefficient(g) for g in graphs])
    print(f"p={p:<5} APL={apl:6.2f} clustering={cc:.3f}")

# %%
# The number of node-disjoint S-D paths, M, measures how many routes compete.
# S and D are placed far apart, as in the experiments.
rng = random.Random(0)
g = ng.generate_ws(ng.NetworkSpec(26, 3, 0.1, 1))
for _ in range(5):
    s, d = choose_sd_pair(g, default_sd_offset(g.n), rng)
    h = g.with_terminals(s, d)
    print(f"S={s:2d} D={d:2d} distance={ng.bfs_distances(h, s)[d]} M={ng.node_disjoint_paths(h)}")

# %%
# Graph files round-trip exactly.
print(ng.dumps(ng.make_parallel_paths(2, 3)))
