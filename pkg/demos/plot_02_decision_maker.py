"""
Choosing one point from the front
=================================

The solver returns a front; the scheduler still has to start exactly one
subset.  The rule is conservative: start from the subset that uses the most
compute nodes, and only move away from it if the loss in nodes is small
(strictly under ``alpha``) and the average relative gain in the other
resources is large (strictly over ``beta``).
"""

from rome.decision import PreferenceConfig, relative_changes, select_solution
from rome.moga import Selection

# %%
# Two candidates: giving up 8 nodes buys 50% more burst buffer.
front = [Selection((1, 0), (100, 10)), Selection((0, 1), (92, 15))]
prefs = PreferenceConfig(alpha=0.10, beta=0.40)
print("chosen:", select_solution(front, prefs).objectives)

# %%
# The relative changes that drive the decision.
loss, gain = relative_changes((92, 15), (100, 10))
print(f"compute loss {loss:.0%}, mean gain elsewhere {gain:.0%}")

# %%
# Both thresholds are strict.  Losing exactly 10% is not allowed, and
# neither is gaining exactly 40%.
for cand in [(90, 20), (95, 14), (91, 20)]:
    pick = select_solution([Selection((1, 0), (100, 10)), Selection((0, 1), cand)], prefs)
    print(cand, "->", pick.objectives)

# %%
# A stricter operator who wants every other dimension to improve can use
# ``aggregation="min"`` instead of the mean.
strict = PreferenceConfig(aggregation="min")
three_d = [Selection((1, 0), (100, 10, 10)), Selection((0, 1), (95, 30, 12))]
print("mean:", select_solution(three_d, prefs).objectives)
print("min: ", select_solution(three_d, strict).objectives)
