"""
How close is the GA to optimal?
===============================

For windows up to 20 jobs the exact front can be enumerated, so the genetic
solver can be graded on hypervolume.  This runs a small version of the
oracle harness and prints the distribution of ratios.
"""

import numpy as np

from rome.moga import GaParams
from rome.oracle import oracle_check

# %%
# Twenty random windows of ten jobs, demands uniform within a (100, 100)
# machine.
res = oracle_check(w=10, instances=20, seed=1, params=GaParams(max_generations=200))
ratios = np.asarray(res.ratios)
print(f"{res.passed}/{len(ratios)} instances at >= {res.threshold} of the exact hypervolume")
print("min / median ratio:", ratios.min().round(4), np.median(ratios).round(4))
print(f"harness time {res.seconds:.2f}s")

# %%
# With a bigger window the gap widens for a fixed generation count.
res14 = oracle_check(w=14, instances=10, seed=1, params=GaParams(max_generations=50))
print("w=14, 50 generations, min ratio:", round(min(res14.ratios), 4))
