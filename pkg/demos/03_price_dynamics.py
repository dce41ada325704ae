"""
Price dynamics on parallel routes
=================================

Members of the selected path raise their price by sigma, everyone else cuts
by rho.  With M equal routes, prices grow forever exactly when
sigma/rho > M - 1.
"""

import random

from tradenet.agents import AgentParams, PriceInitializer, conditional_deltas
from tradenet.expt import ExperimentConfig, lemma_divergence_check, run_series
from tradenet.netgraph import make_parallel_paths

# %%
# Three rounds on a diamond: the two routes take turns.
diamond = make_parallel_paths(2, 2)
cfg = ExperimentConfig(network="inline", rounds=3, initializer=PriceInitializer.constant(0))
log = run_series(diamond, cfg, random.Random(0))
for t, out in enumerate(log.outcomes, 1):
    print(f"round {t}: path {out.selected_path} cost {out.cost:.1f} prices {log.prices[t - 1][2:]}")

# %%
# The divergence threshold.
for M in (2, 3, 4):
    for ratio in (0.5, 2.4, 3.5):
        chk = lemma_divergence_check(M, 3, ratio, 1.0)
        print(f"M={M} sigma/rho={ratio}: predicted={chk.predicted} measured={chk.diverges} "
              f"cost after 1000 rounds={chk.cost_full:.1f}")

# %%
# The rule can be read back from a log.
g = make_parallel_paths(3, 3)
cfg = ExperimentConfig(network="inline", rounds=40, threshold=None,
                       agent_params=AgentParams(2.6, 1.2), initializer=PriceInitializer.constant(100))
print(conditional_deltas(run_series(g, cfg, random.Random(1))))
