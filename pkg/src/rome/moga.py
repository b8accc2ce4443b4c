"""Multi-objective selection of window jobs.

Picking a subset of the window is a multi-dimensional 0/1 knapsack with one
objective per resource dimension: maximize the total demand started in every
dimension without exceeding the free capacity in any of them. ``evolve`` is
an elitist non-dominated sorting GA (binary tournament on rank and crowding,
uniform crossover, bit-flip mutation, tail-first repair) with an archive of
every feasible non-dominated point it has seen. ``exact_front`` enumerates all
``2**w`` subsets and is only meant for small windows.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from rome.policies import Window

__all__ = [
    "Selection",
    "GaParams",
    "ParetoFront",
    "MAX_EXACT_WINDOW",
    "MAX_TIME_BUDGET",
    "evaluate",
    "repair",
    "greedy_fill",
    "dominates",
    "nondominated_sort",
    "crowding_distance",
    "evolve",
    "exact_front",
    "hypervolume_2d",
]

MAX_EXACT_WINDOW = 20
MAX_TIME_BUDGET = 30.0


@dataclass(frozen=True)
class Selection:
    bits: tuple
    objectives: tuple
    feasible: bool = True


@dataclass(frozen=True)
class GaParams:
    population_size: int = 64
    max_generations: int = 128
    crossover_probability: float = 0.9
    # None means 1 / window size
    mutation_probability_per_bit: float | None = None
    time_budget: float = 1.0
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError(f"population_size must be even and >= 4, got {self.population_size}")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if not 0.0 <= self.crossover_probability <= 1.0:
            raise ValueError("crossover_probability must lie in [0, 1]")
        pm = self.mutation_probability_per_bit
        if pm is not None and not 0.0 <= pm <= 1.0:
            raise ValueError("mutation_probability_per_bit must lie in [0, 1]")
        if not 0.0 < self.time_budget <= MAX_TIME_BUDGET:
            raise ValueError(
                f"time_budget must be in (0, {MAX_TIME_BUDGET:g}] seconds, got {self.time_budget}"
            )
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class ParetoFront:
    """Feasible, mutually non-dominated selections in canonical order.

    Members are sorted by descending objectives (dimension 0 first). ``info``
    carries solver bookkeeping such as generations run and elapsed time.
    """

    selections: tuple
    info: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.selections)

    def __iter__(self):
        return iter(self.selections)

    def __getitem__(self, i):
        return self.selections[i]

    @property
    def objectives(self) -> np.ndarray:
        return np.array([s.objectives for s in self.selections])

    def objective_set(self) -> set:
        return {s.objectives for s in self.selections}


def _demands(window) -> np.ndarray:
    if isinstance(window, np.ndarray):
        return window
    jobs = window.jobs if isinstance(window, Window) else list(window)
    if not jobs:
        return np.zeros((0, 0), dtype=np.int64)
    return np.asarray([j.demand for j in jobs])


def _as_tuple(row) -> tuple:
    return tuple(v.item() for v in row)


def evaluate(bits: Sequence[int], window, free) -> Selection:
    """Objective vector and feasibility of one bit vector over ``window``."""
    D = _demands(window)
    bits = tuple(int(b) for b in bits)
    if len(bits) != len(D):
        raise ValueError(f"bit vector has length {len(bits)}, window has {len(D)} jobs")
    free = np.asarray(free)
    if len(D) == 0:
        return Selection((), tuple(0 for _ in free), True)
    obj = np.asarray(bits, dtype=D.dtype) @ D
    return Selection(bits, _as_tuple(obj), bool(np.all(obj <= free)))


def _repair_pop(pop: np.ndarray, D: np.ndarray, free: np.ndarray) -> np.ndarray:
    # Clearing set bits from the tail until feasible keeps exactly the longest
    # feasible prefix: prefix sums only grow, so prefix feasibility is monotone.
    if pop.shape[1] == 0:
        return pop.copy()
    cum = np.cumsum(pop[:, :, None] * D[None, :, :], axis=1)
    keep = np.all(cum <= free, axis=2).sum(axis=1)
    return pop & (np.arange(pop.shape[1]) < keep[:, None])


def repair(bits: Sequence[int], window, free) -> tuple:
    """Make ``bits`` feasible by clearing set bits from the tail of the window.

    Jobs at the end of the window have the lowest base-policy priority, so
    they are dropped first. Feasible input comes back unchanged.
    """
    D = _demands(window)
    if len(bits) != len(D):
        raise ValueError(f"bit vector has length {len(bits)}, window has {len(D)} jobs")
    if len(D) == 0:
        return ()
    pop = np.asarray(bits, dtype=bool)[None, :]
    return tuple(int(b) for b in _repair_pop(pop, D, np.asarray(free))[0])


def greedy_fill(window, free) -> tuple:
    """First-fit in window order: take each job that still fits."""
    D = _demands(window)
    left = np.array(free, dtype=np.result_type(D, np.asarray(free)))
    bits = []
    for row in D:
        if np.all(row <= left):
            left = left - row
            bits.append(1)
        else:
            bits.append(0)
    return tuple(bits)


def dominates(a, b) -> bool:
    if len(a) != len(b):
        raise ValueError(f"objective vectors differ in length: {len(a)} vs {len(b)}")
    return all(x >= y for x, y in zip(a, b)) and any(x > y for x, y in zip(a, b))


def _domination_matrix(obj: np.ndarray) -> np.ndarray:
    """``M[i, j]`` is True when row i dominates row j."""
    n = len(obj)
    ge = np.ones((n, n), dtype=bool)
    gt = np.zeros((n, n), dtype=bool)
    for col in obj.T:
        ge &= col[:, None] >= col[None, :]
        gt |= col[:, None] > col[None, :]
    return ge & gt


def _fronts(obj: np.ndarray) -> list[np.ndarray]:
    n = len(obj)
    if n == 0:
        return []
    dom = _domination_matrix(obj)
    count = dom.sum(axis=0)
    assigned = np.zeros(n, dtype=bool)
    fronts = []
    current = np.flatnonzero(count == 0)
    while current.size:
        fronts.append(current)
        assigned[current] = True
        count = count - dom[current].sum(axis=0)
        current = np.flatnonzero((count == 0) & ~assigned)
    return fronts


def nondominated_sort(population: Sequence[Selection]) -> list[list[int]]:
    """Split ``population`` into successive non-dominated fronts of indices."""
    if not population:
        return []
    obj = np.array([s.objectives for s in population])
    return [f.tolist() for f in _fronts(obj)]


def _unique_rows(obj: np.ndarray):
    """Distinct rows, index of each row's first occurrence, and the inverse map."""
    order = np.lexsort(obj.T[::-1])
    srt = obj[order]
    new = np.ones(len(srt), dtype=bool)
    new[1:] = np.any(srt[1:] != srt[:-1], axis=1)
    inv = np.empty(len(obj), dtype=np.intp)
    inv[order] = np.cumsum(new) - 1
    return srt[new], order[new], inv


def _crowd_unique(uniq: np.ndarray) -> np.ndarray:
    m = len(uniq)
    if m <= 2:
        return np.full(m, np.inf)
    dist = np.zeros(m)
    for vals in uniq.T.astype(float):
        order = np.argsort(vals, kind="stable")
        dist[order[0]] = dist[order[-1]] = np.inf
        span = vals[order[-1]] - vals[order[0]]
        if span > 0:
            dist[order[1:-1]] += (vals[order[2:]] - vals[order[:-2]]) / span
    return dist


def _crowding(obj: np.ndarray) -> np.ndarray:
    out = np.zeros(len(obj))
    if len(obj) == 0:
        return out
    uniq, first, _ = _unique_rows(obj)
    # later copies of an objective vector add no diversity
    out[first] = _crowd_unique(uniq)
    return out


def crowding_distance(front: Sequence[Selection]) -> list[float]:
    """Crowding distance per member; repeated objective vectors after the first get 0."""
    if not front:
        return []
    return _crowding(np.array([s.objectives for s in front])).tolist()


def _canonical(bits: np.ndarray, obj: np.ndarray):
    """Dedupe by objective, drop dominated rows and sort canonically.

    Among bit vectors with equal objectives the lexicographically largest is
    kept, i.e. the one whose jobs sit earliest in the window.
    """
    w = bits.shape[1]
    d = obj.shape[1]
    keys = [~bits[:, i] for i in reversed(range(w))] + [-obj[:, k] for k in reversed(range(d))]
    order = np.lexsort(keys)
    bits, obj = bits[order], obj[order]
    keep = np.ones(len(obj), dtype=bool)
    keep[1:] = np.any(obj[1:] != obj[:-1], axis=1)
    bits, obj = bits[keep], obj[keep]
    nd = ~_domination_matrix(obj).any(axis=0)
    return bits[nd], obj[nd]


def _canonical_front(bits: np.ndarray, obj: np.ndarray, info=None) -> ParetoFront:
    bits, obj = _canonical(bits, obj)
    sels = tuple(
        Selection(tuple(int(b) for b in row), _as_tuple(o), True) for row, o in zip(bits, obj)
    )
    return ParetoFront(sels, dict(info or {}))


def _empty_front(free, info=None) -> ParetoFront:
    zero = tuple(0 for _ in np.atleast_1d(free))
    return ParetoFront((Selection((), zero, True),), dict(info or {}))


class _Archive:
    """Non-dominated set of every feasible individual seen so far."""

    def __init__(self, w: int, d: int, dtype):
        self.bits = np.zeros((0, w), dtype=bool)
        self.obj = np.zeros((0, d), dtype=dtype)

    def add(self, bits: np.ndarray, obj: np.ndarray):
        self.bits, self.obj = _canonical(np.vstack([self.bits, bits]), np.vstack([self.obj, obj]))

    def front(self, info) -> ParetoFront:
        return _canonical_front(self.bits, self.obj, info)


def _survivors(obj: np.ndarray, size: int):
    """Elitist truncation by (front rank, descending crowding distance).

    Ranks are computed on distinct objective vectors; repeated copies share
    the rank but only the first copy keeps its crowding distance.
    """
    uniq, first, inv = _unique_rows(obj)
    urank = np.empty(len(uniq), dtype=np.intp)
    ucrowd = np.empty(len(uniq))
    for r, f in enumerate(_fronts(uniq)):
        urank[f] = r
        ucrowd[f] = _crowd_unique(uniq[f])
    rank = urank[inv]
    crowd = np.zeros(len(obj))
    crowd[first] = ucrowd
    chosen = np.lexsort((-crowd, rank))[:size]
    return chosen, rank[chosen], crowd[chosen]


def evolve(window, free, params: GaParams = GaParams()) -> ParetoFront:
    """Approximate the Pareto front of feasible window selections.

    Returns the archive of non-dominated feasible individuals. The search stops
    after ``params.max_generations`` or once ``params.time_budget`` seconds have
    elapsed, whichever comes first. Output depends only on the inputs and
    ``params.seed`` (unless the time budget cuts the run short); the worker
    count only changes how evaluations are spread over threads.
    """
    start = time.perf_counter()
    free = np.asarray(free)
    D = _demands(window)
    w = len(D)
    info = {"generations": 0, "elapsed": 0.0, "budget_hit": False, "max_generation_seconds": 0.0}
    if w == 0:
        return _empty_front(free, info)
    # jobs that cannot fit on their own are zero in every feasible selection
    fits = np.all(D <= free, axis=1)
    if np.all(D[fits].sum(axis=0) <= free):
        # the fitting jobs fit together; that selection dominates all others
        info.update(elapsed=time.perf_counter() - start, shortcut="all_fit")
        best = fits[None, :]
        return _canonical_front(best, best.astype(D.dtype) @ D, info)
    if not fits.all():
        sub = evolve(D[fits], free, params)
        full = np.zeros((len(sub), w), dtype=bool)
        full[:, fits] = [s.bits for s in sub]
        info = dict(sub.info)
        info["elapsed"] = time.perf_counter() - start
        return _canonical_front(full, full.astype(D.dtype) @ D, info)

    rng = np.random.default_rng(params.seed)
    n = params.population_size
    pm = params.mutation_probability_per_bit
    if pm is None:
        pm = 1.0 / w
    pc = params.crossover_probability

    pool = ThreadPoolExecutor(params.workers) if params.workers > 1 else None

    def repair_eval(pop):
        if pool is None:
            fixed = _repair_pop(pop, D, free)
            return fixed, fixed.astype(D.dtype) @ D
        chunks = np.array_split(np.arange(len(pop)), params.workers)
        parts = list(pool.map(lambda idx: _repair_pop(pop[idx], D, free), chunks))
        fixed = np.vstack(parts)
        objs = list(pool.map(lambda p: p.astype(D.dtype) @ D, parts))
        return fixed, np.vstack(objs)

    try:
        seeds = np.zeros((3, w), dtype=bool)
        seeds[1] = True
        seeds[2] = np.asarray(greedy_fill(D, free), dtype=bool)
        randoms = rng.random((n - 3, w)) < 0.5
        pop, obj = repair_eval(np.vstack([seeds, randoms]))
        archive = _Archive(w, D.shape[1], D.dtype)
        archive.add(pop, obj)
        keep, rank, crowd = _survivors(obj, n)
        pop, obj = pop[keep], obj[keep]

        last = 0.0
        for gen in range(params.max_generations):
            # stop if another generation like the last one would overrun
            if time.perf_counter() - start + last >= params.time_budget:
                info["budget_hit"] = True
                break
            t0 = time.perf_counter()
            a = rng.integers(n, size=n)
            b = rng.integers(n, size=n)
            a_wins = (rank[a] < rank[b]) | ((rank[a] == rank[b]) & (crowd[a] >= crowd[b]))
            parents = pop[np.where(a_wins, a, b)]
            p1, p2 = parents[0::2], parents[1::2]
            cross = rng.random(n // 2) < pc
            swap = (rng.random((n // 2, w)) < 0.5) & cross[:, None]
            children = np.vstack([np.where(swap, p2, p1), np.where(swap, p1, p2)])
            children ^= rng.random((n, w)) < pm
            children, cobj = repair_eval(children)
            archive.add(children, cobj)

            union, uobj = np.vstack([pop, children]), np.vstack([obj, cobj])
            keep, rank, crowd = _survivors(uobj, n)
            pop, obj = union[keep], uobj[keep]
            last = time.perf_counter() - t0
            info["generations"] = gen + 1
            info["max_generation_seconds"] = max(info["max_generation_seconds"], last)
    finally:
        if pool is not None:
            pool.shutdown()

    info["elapsed"] = time.perf_counter() - start
    return archive.front(info)


def exact_front(window, free) -> ParetoFront:
    """Exact Pareto front by enumerating every subset of the window.

    Raises:
        ValueError: the window holds more than ``MAX_EXACT_WINDOW`` jobs.
    """
    D = _demands(window)
    w = len(D)
    if w > MAX_EXACT_WINDOW:
        raise ValueError(
            f"exact enumeration refused: window of {w} jobs exceeds MAX_EXACT_WINDOW={MAX_EXACT_WINDOW}"
        )
    free = np.asarray(free)
    if w == 0:
        return _empty_front(free)
    masks = np.arange(1 << w, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(w)) & 1).astype(bool)
    obj = np.zeros((len(masks), D.shape[1]), dtype=D.dtype)
    for i in range(w):
        obj += bits[:, i, None] * D[i]
    ok = np.all(obj <= free, axis=1)
    bits, obj = bits[ok], obj[ok]
    uniq, inv = np.unique(obj, axis=0, return_inverse=True)
    if uniq.shape[1] == 2:
        # descending sweep: a point survives iff it beats every earlier y
        order = np.lexsort((-uniq[:, 1], -uniq[:, 0]))
        ys = uniq[order, 1]
        best_before = np.concatenate([[-np.inf], np.maximum.accumulate(ys)[:-1]])
        nd = np.zeros(len(uniq), dtype=bool)
        nd[order[ys > best_before]] = True
    elif len(uniq) <= 4096:
        nd = ~_domination_matrix(uniq).any(axis=0)
    else:
        nd = _nd_loop(uniq)
    sel = nd[inv.ravel()]
    return _canonical_front(bits[sel], obj[sel], {"enumerated": 1 << w})


def _nd_loop(uniq: np.ndarray) -> np.ndarray:
    order = np.lexsort([-uniq[:, k] for k in reversed(range(uniq.shape[1]))])
    front = []
    nd = np.zeros(len(uniq), dtype=bool)
    for i in order:
        p = uniq[i]
        if front and np.any(np.all(uniq[front] >= p, axis=1)):
            continue
        front.append(i)
        nd[i] = True
    return nd


def hypervolume_2d(front, reference=(0, 0)) -> float:
    """Area dominated by a two-objective front and bounded below by ``reference``."""
    pts = front.objectives if isinstance(front, ParetoFront) else np.asarray(front)
    pts = np.asarray(pts, dtype=float)
    if pts.size == 0:
        return 0.0
    if pts.ndim != 2 or pts.shape[1] != 2 or len(reference) != 2:
        raise ValueError("hypervolume_2d needs exactly two objectives")
    ref = np.asarray(reference, dtype=float)
    pts = pts[np.all(pts >= ref, axis=1)]
    order = np.lexsort((-pts[:, 1], -pts[:, 0]))
    area = 0.0
    top = ref[1]
    for x, y in pts[order]:
        if y > top:
            area += (x - ref[0]) * (y - top)
            top = y
    return float(area)
