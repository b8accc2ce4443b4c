"""Discrete-event replay of a job trace.

Events at one timestamp are drained (job ends before submissions, then by job
id) and a single scheduling instance runs afterwards. Under the ``rome``
scheduler an instance cuts a window from the policy-ordered queue, solves the
multi-objective selection problem over it, lets the decision maker pick one
front member and starts those jobs. If that started anything, the window is
cut again from the shrunken queue until a pass starts nothing. The ``fcfs``
scheduler is the single-objective reference: start the oldest job while it
fits, stop at the first one that does not.
"""

from __future__ import annotations

import heapq
import logging
import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from rome.decision import PreferenceConfig, select_solution
from rome.moga import GaParams, evolve, exact_front
from rome.policies import WindowConfig, order_fcfs, order_queue, take_window
from rome.trace import Job, SystemSpec

log = logging.getLogger(__name__)

__all__ = [
    "END",
    "SUBMIT",
    "InvariantError",
    "SchedulerConfig",
    "SystemState",
    "JobRecord",
    "InstanceRecord",
    "SimulationResult",
    "allocate",
    "release",
    "snapshot_free",
    "run_simulation",
    "instance_seed",
]

# event kinds sort in this order at equal timestamps
END = 0
SUBMIT = 1
KIND_NAMES = {END: "end", SUBMIT: "submit"}

SCHEDULERS = ("rome", "fcfs")
SOLVERS = ("ga", "exact")


class InvariantError(RuntimeError):
    """Internal bookkeeping violated an invariant; the run cannot continue."""


@dataclass(frozen=True)
class SchedulerConfig:
    kind: str = "rome"
    window: WindowConfig = field(default_factory=WindowConfig)
    ga: GaParams = field(default_factory=GaParams)
    prefs: PreferenceConfig = field(default_factory=PreferenceConfig)
    solver: str = "ga"

    def __post_init__(self):
        if self.kind not in SCHEDULERS:
            raise ValueError(f"unknown scheduler {self.kind!r}; expected one of {SCHEDULERS}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; expected one of {SOLVERS}")


class SystemState:
    """Capacity bookkeeping owned by the event loop."""

    def __init__(self, spec: SystemSpec):
        self.spec = spec
        self.used = [0] * spec.ndim
        self.running: dict[int, tuple[Job, float, float]] = {}
        self.queue: dict[int, Job] = {}
        self.events: list[tuple] = []
        self.clock = 0

    def copy(self) -> "SystemState":
        other = SystemState(self.spec)
        other.used = list(self.used)
        other.running = dict(self.running)
        other.queue = dict(self.queue)
        other.events = list(self.events)
        other.clock = self.clock
        return other

    def free(self) -> tuple:
        return tuple(c - u for c, u in zip(self.spec.capacity, self.used))

    def fits(self, job: Job) -> bool:
        return all(u + d <= c for u, d, c in zip(self.used, job.demand, self.spec.capacity))

    def allocate(self, job: Job, now: float) -> "SystemState":
        if job.id in self.running:
            raise InvariantError(f"job {job.id} is already running")
        if not self.fits(job):
            raise InvariantError(
                f"job {job.id} demand {job.demand} does not fit free capacity {self.free()}"
            )
        self.used = [u + d for u, d in zip(self.used, job.demand)]
        self.queue.pop(job.id, None)
        end = now + job.actual_runtime
        self.running[job.id] = (job, now, end)
        heapq.heappush(self.events, (end, END, job.id))
        return self

    def release(self, job_id: int) -> "SystemState":
        if job_id not in self.running:
            raise InvariantError(f"job {job_id} is not running")
        job, _, end = self.running[job_id]
        if end != self.clock:
            raise InvariantError(f"job {job_id} ends at {end}, clock is {self.clock}")
        del self.running[job_id]
        self.used = [u - d for u, d in zip(self.used, job.demand)]
        return self

    def audit(self) -> None:
        """Check conservation and capacity bounds."""
        for d, cap in enumerate(self.spec.capacity):
            total = sum(job.demand[d] for job, _, _ in self.running.values())
            tol = 1e-9 * cap if isinstance(total, float) else 0
            if abs(self.used[d] - total) > tol:
                raise InvariantError(
                    f"dimension {d}: used {self.used[d]} != running demand {total} at t={self.clock}"
                )
            if not -tol <= self.used[d] <= cap + tol:
                raise InvariantError(f"dimension {d}: used {self.used[d]} outside [0, {cap}]")


def allocate(state: SystemState, job: Job, now: float) -> SystemState:
    return state.allocate(job, now)


def release(state: SystemState, job_id: int) -> SystemState:
    return state.release(job_id)


def snapshot_free(state: SystemState) -> tuple:
    return state.free()


@dataclass(frozen=True)
class JobRecord:
    id: int
    submit: float
    start: float | None = None
    end: float | None = None

    @property
    def wait(self):
        return None if self.start is None else self.start - self.submit


@dataclass(frozen=True)
class InstanceRecord:
    time: float
    index: int
    pass_index: int
    window: tuple
    started: tuple
    front_size: int = 0
    chosen: tuple = ()
    generations: int = 0
    solver_seconds: float = 0.0
    budget_hit: bool = False
    max_generation_seconds: float = 0.0


@dataclass
class SimulationResult:
    spec: SystemSpec
    jobs: list
    records: dict
    times: list
    levels: list
    instances: list
    events: list

    @property
    def unstarted(self) -> list[int]:
        return [i for i, r in self.records.items() if r.start is None]

    def utilization_series(self):
        from rome.metrics import UtilizationSeries

        return UtilizationSeries.from_result(self)


def instance_seed(base: int, index: int, pass_index: int = 0) -> int:
    """Solver seed for one pass of one scheduling instance."""
    return int(np.random.SeedSequence([base & (2**64 - 1), index, pass_index]).generate_state(1)[0])


def _fcfs_instance(state: SystemState, now: float, index: int) -> list[InstanceRecord]:
    ordered = order_fcfs(state.queue.values())
    if not ordered:
        return []
    started = []
    considered = []
    for job in ordered:
        considered.append(job.id)
        if not state.fits(job):
            break
        state.allocate(job, now)
        started.append(job.id)
    return [InstanceRecord(now, index, 0, tuple(considered), tuple(started))]


def _rome_instance(state: SystemState, now: float, index: int, cfg: SchedulerConfig) -> list[InstanceRecord]:
    out = []
    pass_index = 0
    while state.queue:
        window = take_window(order_queue(list(state.queue.values()), cfg.window, now), cfg.window, now)
        free = state.free()
        t0 = time.perf_counter()
        if cfg.solver == "exact":
            front = exact_front(window, free)
        else:
            params = replace(cfg.ga, seed=instance_seed(cfg.ga.seed, index, pass_index))
            front = evolve(window, free, params)
        chosen = select_solution(front, cfg.prefs)
        seconds = time.perf_counter() - t0
        started = [job for job, bit in zip(window, chosen.bits) if bit]
        for job in started:
            state.allocate(job, now)
        info = front.info
        out.append(
            InstanceRecord(
                time=now,
                index=index,
                pass_index=pass_index,
                window=tuple(window.ids),
                started=tuple(j.id for j in started),
                front_size=len(front),
                chosen=chosen.objectives,
                generations=info.get("generations", 0),
                solver_seconds=seconds,
                budget_hit=info.get("budget_hit", False),
                max_generation_seconds=info.get("max_generation_seconds", 0.0),
            )
        )
        if not started:
            break
        pass_index += 1
    return out


def run_simulation(
    jobs: Sequence[Job],
    spec: SystemSpec,
    scheduler: SchedulerConfig = SchedulerConfig(),
    audit: bool = True,
) -> SimulationResult:
    """Replay ``jobs`` on ``spec`` under ``scheduler``.

    Raises:
        ValueError: a job can never fit the machine or has the wrong dimensions.
        InvariantError: capacity bookkeeping broke (a scheduler bug).
    """
    by_id = {}
    for job in jobs:
        if len(job.demand) != spec.ndim:
            raise ValueError(f"job {job.id} has {len(job.demand)} demand values, system has {spec.ndim}")
        if any(d > c for d, c in zip(job.demand, spec.capacity)):
            raise ValueError(f"job {job.id} demand {job.demand} exceeds capacity {spec.capacity}")
        if job.id in by_id:
            raise ValueError(f"duplicate job id {job.id}")
        by_id[job.id] = job

    state = SystemState(spec)
    for job in jobs:
        heapq.heappush(state.events, (job.submit_time, SUBMIT, job.id))
    records = {j.id: JobRecord(j.id, j.submit_time) for j in jobs}
    times, levels, instances, processed = [], [], [], []
    index = 0

    while state.events:
        now = state.events[0][0]
        state.clock = now
        while state.events and state.events[0][0] == now:
            _, kind, job_id = heapq.heappop(state.events)
            processed.append((now, KIND_NAMES[kind], job_id))
            if kind == END:
                state.release(job_id)
                records[job_id] = replace(records[job_id], end=now)
            else:
                state.queue[job_id] = by_id[job_id]
            if audit:
                state.audit()

        if scheduler.kind == "fcfs":
            entries = _fcfs_instance(state, now, index)
        else:
            entries = _rome_instance(state, now, index, scheduler)
        for entry in entries:
            for job_id in entry.started:
                records[job_id] = replace(records[job_id], start=now)
        instances.extend(entries)
        index += 1
        if audit:
            state.audit()
        times.append(now)
        levels.append(tuple(state.used))

    log.debug("simulated %d jobs, %d scheduling instances", len(jobs), index)
    return SimulationResult(
        spec=spec,
        jobs=list(jobs),
        records=records,
        times=times,
        levels=levels,
        instances=instances,
        events=processed,
    )
