"""GA-versus-exact quality harness on random two-resource windows."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from rome.moga import GaParams, evolve, exact_front, hypervolume_2d
from rome.policies import Window
from rome.trace import Job

__all__ = ["OracleResult", "random_window", "oracle_check"]


def random_window(rng: np.random.Generator, w: int, capacity=(100, 100)) -> Window:
    """``w`` jobs with node demand uniform in [1, N] and other demands uniform in [0, cap]."""
    cols = [rng.integers(1, capacity[0] + 1, size=w)]
    cols += [rng.integers(0, c + 1, size=w) for c in capacity[1:]]
    demand = np.stack(cols, axis=1)
    return Window(tuple(Job(i, 0, 1, 1, tuple(int(v) for v in demand[i])) for i in range(w)))


@dataclass
class OracleResult:
    ratios: list
    threshold: float
    seconds: float

    @property
    def passed(self) -> int:
        return sum(r >= self.threshold for r in self.ratios)


def oracle_check(
    w: int = 10,
    instances: int = 50,
    seed: int = 0,
    capacity=(100, 100),
    params: GaParams = GaParams(max_generations=200),
    threshold: float = 0.95,
) -> OracleResult:
    """Hypervolume ratio of ``evolve`` to ``exact_front`` on seeded random windows."""
    rng = np.random.default_rng(seed)
    ratios = []
    start = time.perf_counter()
    for k in range(instances):
        window = random_window(rng, w, capacity)
        exact = hypervolume_2d(exact_front(window, capacity))
        ga = hypervolume_2d(evolve(window, capacity, replace(params, seed=seed * 1_000_003 + k)))
        ratios.append(1.0 if exact == 0 else ga / exact)
    return OracleResult(ratios, threshold, time.perf_counter() - start)
