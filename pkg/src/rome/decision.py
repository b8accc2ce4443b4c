"""Pick one schedule from a Pareto front using administrator preferences.

The compute-maximizing member is the default. It is traded away only for a
member that gives up less than ``alpha`` of its compute objective while
improving the remaining resources by more than ``beta`` (both relative to
the default member).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from rome.moga import ParetoFront, Selection

__all__ = ["PreferenceConfig", "select_solution", "relative_changes"]

AGGREGATIONS = ("mean", "min")


@dataclass(frozen=True)
class PreferenceConfig:
    alpha: float = 0.10
    beta: float = 0.40
    aggregation: str = "mean"

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}")


def _improvement(new, ref) -> float:
    if ref == 0:
        # any gain over nothing is unbounded
        return math.inf if new > 0 else 0.0
    return (new - ref) / ref


def relative_changes(candidate: Sequence, reference: Sequence, aggregation: str = "mean"):
    """Return ``(compute_decrease, other_improvement)`` of ``candidate`` vs ``reference``.

    ``compute_decrease`` is None when the reference has no compute and the
    candidate does, which the trade-off rule treats as ineligible.
    """
    if reference[0] == 0:
        decrease = 0.0 if candidate[0] == 0 else None
    else:
        decrease = (reference[0] - candidate[0]) / reference[0]
    gains = [_improvement(c, r) for c, r in zip(candidate[1:], reference[1:])]
    if not gains:
        return decrease, 0.0
    if aggregation == "min":
        return decrease, min(gains)
    if math.inf in gains:
        return decrease, math.inf
    return decrease, sum(gains) / len(gains)


def select_solution(front: ParetoFront | Sequence[Selection], prefs: PreferenceConfig = PreferenceConfig()) -> Selection:
    """Choose one member of ``front``.

    Raises:
        ValueError: the front is empty.
    """
    members = list(front)
    if not members:
        raise ValueError("cannot select from an empty front")

    best = min(members, key=lambda s: (-s.objectives[0], -_at(s, 1), _neg(s.bits)))
    if len(members) == 1:
        return best

    candidates = []
    for s in members:
        decrease, gain = relative_changes(s.objectives, best.objectives, prefs.aggregation)
        if decrease is None:
            continue
        if best.objectives[0] == 0:
            eligible = s.objectives[0] == 0
        else:
            eligible = decrease < prefs.alpha
        if eligible and gain > prefs.beta:
            candidates.append((gain, s))
    if not candidates:
        return best
    return min(candidates, key=lambda c: (-c[0], -c[1].objectives[0], _neg(c[1].bits)))[1]


def _neg(bits) -> tuple:
    # remaining ties go to the selection holding the earliest window jobs
    return tuple(-b for b in bits)


def _at(sel: Selection, d: int):
    return sel.objectives[d] if len(sel.objectives) > d else 0
