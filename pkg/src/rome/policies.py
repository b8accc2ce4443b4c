"""Base queue policies and the scheduling window."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from rome.trace import Job

__all__ = ["WindowConfig", "Window", "order_fcfs", "order_wfp", "order_queue", "take_window"]

POLICIES = ("fcfs", "wfp")


@dataclass(frozen=True)
class WindowConfig:
    w: int = 20
    policy: str = "fcfs"
    wfp_exponent: float = 3.0

    def __post_init__(self):
        if self.w < 1:
            raise ValueError(f"window size must be >= 1, got {self.w}")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}; expected one of {POLICIES}")


@dataclass(frozen=True)
class Window:
    jobs: tuple
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))

    def __len__(self):
        return len(self.jobs)

    def __iter__(self):
        return iter(self.jobs)

    def __getitem__(self, i):
        return self.jobs[i]

    @property
    def ids(self) -> list[int]:
        return [j.id for j in self.jobs]


def order_fcfs(queue: Sequence[Job]) -> list[Job]:
    return sorted(queue, key=lambda j: (j.submit_time, j.id))


def wfp_score(job: Job, now: float, exponent: float = 3.0) -> float:
    wait = now - job.submit_time
    return job.demand[0] * (wait / job.requested_walltime) ** exponent


def order_wfp(queue: Sequence[Job], now: float, exponent: float = 3.0) -> list[Job]:
    """Highest ``nodes * (wait / walltime) ** exponent`` first, FCFS on ties."""
    return sorted(queue, key=lambda j: (-wfp_score(j, now, exponent), j.submit_time, j.id))


def order_queue(queue: Sequence[Job], cfg: WindowConfig, now: float) -> list[Job]:
    if cfg.policy == "wfp":
        return order_wfp(queue, now, cfg.wfp_exponent)
    return order_fcfs(queue)


def take_window(ordered: Sequence[Job], cfg: WindowConfig, time: float = 0.0) -> Window:
    return Window(tuple(ordered[: cfg.w]), time)
