"""
Small-world versus random networks
==================================

Thresholded 15-round batches on fresh networks per replication.  Random
networks trade more cheaply.  With only 40
replications the efficiency gap is usually too small to clear |t| > 2.6;
the acceptance suite uses 100.
"""

from tradenet import reproduce

for n, k in [(26, 3), (50, 4)]:
    batches = reproduce.topology_comparison(n, k, replications=40, rounds=15, seed=1)
    print(reproduce.summary_table({f"R {n}": batches[1.0][-1], f"SW {n}": batches[0.1][-1]}))
    for check in reproduce.topology_checks(n, k, batches):
        print(check.line())
    print()
