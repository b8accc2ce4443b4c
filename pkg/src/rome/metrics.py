"""Utilization and wait-time metrics, run reports and run comparison."""

from __future__ import annotations

import hashlib
import json
import statistics
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from rome.trace import trace_digest

__all__ = [
    "UtilizationSeries",
    "WaitStats",
    "ReportMismatchError",
    "time_weighted_utilization",
    "wait_time_stats",
    "build_report",
    "compare_runs",
    "dumps_report",
    "spec_digest",
]

REPORT_VERSION = 1

# Deltas are candidate minus baseline. Positive utilization deltas and
# negative wait deltas favour the candidate.
SIGN_CONVENTION = "delta = candidate - baseline; relative = delta / baseline"


class ReportMismatchError(ValueError):
    """The two reports were not produced from the same trace and system."""


@dataclass(frozen=True)
class UtilizationSeries:
    """Per-dimension step functions of used capacity.

    ``levels[k]`` holds from ``times[k]`` until ``times[k + 1]``; the last level
    holds until ``span[1]``.
    """

    times: np.ndarray
    levels: np.ndarray
    span: tuple

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        levels = np.asarray(self.levels, dtype=float)
        if levels.ndim == 1:
            levels = levels[:, None]
        if len(times) != len(levels):
            raise ValueError("times and levels differ in length")
        if len(times) > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "span", (float(self.span[0]), float(self.span[1])))

    @classmethod
    def from_result(cls, result) -> "UtilizationSeries":
        ndim = result.spec.ndim
        if not result.times:
            return cls(np.zeros(0), np.zeros((0, ndim)), (0.0, 0.0))
        first = min(j.submit_time for j in result.jobs)
        ends = [r.end for r in result.records.values() if r.end is not None]
        last = max(ends) if ends else result.times[-1]
        return cls(np.asarray(result.times), np.asarray(result.levels), (first, last))


def time_weighted_utilization(series: UtilizationSeries, capacity: Sequence) -> np.ndarray:
    """Mean of used/capacity over the span, per dimension.

    Raises:
        ValueError: the span has zero length.
    """
    t0, t1 = series.span
    if not t1 > t0:
        raise ValueError(f"utilization needs a positive span, got [{t0}, {t1}]")
    cap = np.asarray(capacity, dtype=float)
    if len(series.times) == 0:
        return np.zeros(len(cap))
    edges = np.clip(np.append(series.times, t1), t0, t1)
    widths = np.diff(edges)
    area = widths @ series.levels
    return area / (cap * (t1 - t0))


@dataclass(frozen=True)
class WaitStats:
    count: int
    mean: float | None
    median: float | None
    max: float | None
    waits: dict
    unstarted: tuple = ()

    @property
    def empty(self) -> bool:
        return self.count == 0

    @property
    def truncated(self) -> bool:
        return bool(self.unstarted)

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "median": self.median,
            "max": self.max,
            "truncated": self.truncated,
            "unstarted": list(self.unstarted),
            "per_job": {str(k): v for k, v in sorted(self.waits.items())},
        }


def wait_time_stats(result) -> WaitStats:
    """Wait = start - submit. Jobs that never started are listed separately."""
    waits = {}
    unstarted = []
    for job_id, rec in sorted(result.records.items()):
        if rec.start is None:
            unstarted.append(job_id)
        else:
            waits[job_id] = rec.start - rec.submit
    if not waits:
        return WaitStats(0, None, None, None, {}, tuple(unstarted))
    vals = list(waits.values())
    return WaitStats(
        count=len(vals),
        mean=statistics.fmean(vals),
        median=statistics.median(vals),
        max=max(vals),
        waits=waits,
        unstarted=tuple(unstarted),
    )


def spec_digest(spec) -> str:
    payload = json.dumps([list(spec.dimension_names), list(spec.capacity)])
    return hashlib.sha256(payload.encode()).hexdigest()


def _utilization(result) -> dict:
    names = result.spec.dimension_names
    series = UtilizationSeries.from_result(result)
    t0, t1 = series.span
    if t1 > t0:
        util = time_weighted_utilization(series, result.spec.capacity)
    else:
        util = np.zeros(result.spec.ndim)
    if np.any(util > 1 + 1e-12) or np.any(util < 0):
        raise AssertionError(f"utilization outside [0, 1]: {util}")
    return {
        "span": [t0, t1],
        "fraction": {n: float(u) for n, u in zip(names, util)},
    }


def _instance_dict(rec, timings: bool) -> dict:
    out = {
        "time": rec.time,
        "index": rec.index,
        "pass": rec.pass_index,
        "window": list(rec.window),
        "started": list(rec.started),
        "front_size": rec.front_size,
        "chosen": list(rec.chosen),
        "generations": rec.generations,
    }
    if timings:
        out["solver_seconds"] = rec.solver_seconds
        out["budget_hit"] = rec.budget_hit
        out["max_generation_seconds"] = rec.max_generation_seconds
    return out


def build_report(result, config: dict, timings: bool = False) -> dict:
    """Assemble the JSON-ready run report.

    ``config`` is echoed verbatim next to trace and system digests. Solver
    wall-clock times vary run to run, so they are only included when
    ``timings`` is set.
    """
    echo = dict(config)
    echo["trace_sha256"] = trace_digest(result.jobs, result.spec)
    echo["spec_sha256"] = spec_digest(result.spec)
    echo["dimensions"] = list(result.spec.dimension_names)
    echo["capacity"] = list(result.spec.capacity)
    stats = wait_time_stats(result)
    return {
        "version": REPORT_VERSION,
        "config": echo,
        "utilization": _utilization(result),
        "wait_times": stats.to_dict(),
        "jobs": {
            str(r.id): {"submit": r.submit, "start": r.start, "end": r.end}
            for r in sorted(result.records.values(), key=lambda r: r.id)
        },
        "instances": [_instance_dict(r, timings) for r in result.instances],
    }


def _rel(delta, base):
    if base is None or delta is None:
        return None
    if base == 0:
        return None if delta else 0.0
    return delta / base


def compare_runs(candidate: dict, baseline: dict) -> dict:
    """Per-dimension utilization and wait-time deltas of ``candidate`` vs ``baseline``.

    Raises:
        ReportMismatchError: the reports come from different traces or systems.
    """
    for key in ("trace_sha256", "spec_sha256"):
        if candidate["config"].get(key) != baseline["config"].get(key):
            raise ReportMismatchError(f"reports differ in {key}; refusing to compare")
    util = {}
    for name, base in baseline["utilization"]["fraction"].items():
        cand = candidate["utilization"]["fraction"][name]
        util[name] = {
            "candidate": cand,
            "baseline": base,
            "delta_pp": 100.0 * (cand - base),
            "relative": _rel(cand - base, base),
        }
    waits = {}
    for stat in ("mean", "median", "max"):
        cand = candidate["wait_times"][stat]
        base = baseline["wait_times"][stat]
        delta = None if cand is None or base is None else cand - base
        waits[stat] = {"candidate": cand, "baseline": base, "delta": delta, "relative": _rel(delta, base)}
    return {
        "sign_convention": SIGN_CONVENTION,
        "candidate": candidate["config"].get("scheduler"),
        "baseline": baseline["config"].get("scheduler"),
        "utilization": util,
        "wait_times": waits,
    }


def dumps_report(report: dict) -> str:
    """Canonical serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
