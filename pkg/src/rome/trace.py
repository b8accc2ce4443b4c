"""Job traces: the text format, a seeded synthetic generator, and validation.

Trace files are UTF-8 text. The first non-comment line declares the resource
dimensions, every following line is one job::

    #dims:nodes,bb_gb
    # id,submit_time,requested_walltime,actual_runtime,demand0,demand1
    1,0,3600,1800,4,10

Lines starting with ``#`` (other than the ``#dims:`` header) are ignored.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Job",
    "SystemSpec",
    "GenConfig",
    "Issue",
    "ValidationReport",
    "TraceParseError",
    "TraceValidationError",
    "parse_trace",
    "format_trace",
    "read_trace",
    "write_trace",
    "generate_synthetic",
    "validate_jobs",
    "trace_digest",
]

HEADER_PREFIX = "#dims:"


class TraceParseError(ValueError):
    """Raised for malformed trace text; carries the offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class TraceValidationError(ValueError):
    """Raised when a job can never be run on the given system."""


def _number(value: str) -> int | float:
    # keep integers exact so capacity bookkeeping stays exact
    try:
        return int(value)
    except ValueError:
        out = float(value)
        if not math.isfinite(out):
            raise ValueError(f"non-finite value {value!r}")
        return int(out) if out.is_integer() else out


@dataclass(frozen=True)
class Job:
    id: int
    submit_time: float
    requested_walltime: float
    actual_runtime: float
    demand: tuple

    def __post_init__(self):
        object.__setattr__(self, "demand", tuple(self.demand))

    @property
    def nodes(self):
        return self.demand[0]


@dataclass(frozen=True)
class SystemSpec:
    """Total capacity per resource dimension. Dimension 0 is compute nodes."""

    dimension_names: tuple
    capacity: tuple

    def __post_init__(self):
        object.__setattr__(self, "dimension_names", tuple(self.dimension_names))
        object.__setattr__(self, "capacity", tuple(self.capacity))
        if len(self.dimension_names) != len(self.capacity):
            raise ValueError("dimension_names and capacity differ in length")
        if not self.capacity:
            raise ValueError("at least one resource dimension is required")
        if len(set(self.dimension_names)) != len(self.dimension_names):
            raise ValueError(f"duplicate dimension names: {self.dimension_names}")
        if any(not c > 0 for c in self.capacity):
            raise ValueError(f"capacities must be positive, got {self.capacity}")

    @property
    def ndim(self) -> int:
        return len(self.capacity)

    @classmethod
    def two_dim(cls, nodes, bb_gb, bb_name="bb_gb") -> "SystemSpec":
        return cls(("nodes", bb_name), (nodes, bb_gb))


@dataclass(frozen=True)
class GenConfig:
    """Parameters of the synthetic workload generator.

    Inter-arrival times are exponential, runtimes log-uniform and requested
    walltimes overestimate the runtime by a uniform factor. Node demand is a
    log-uniform integer in ``[1, node_max_fraction * nodes]``. Every other
    dimension is zero with probability ``zero_probability[d-1]`` and otherwise
    uniform in ``[1, demand_max_fraction[d-1] * capacity[d]]``.
    """

    job_count: int
    seed: int = 0
    mean_interarrival: float = 60.0
    runtime_min: float = 60.0
    runtime_max: float = 7200.0
    walltime_overestimate_max: float = 2.0
    node_max_fraction: float = 0.5
    demand_max_fraction: tuple = (0.5,)
    zero_probability: tuple = (0.3,)

    def __post_init__(self):
        if self.job_count < 0:
            raise ValueError("job_count must be non-negative")
        for name in ("mean_interarrival", "runtime_min", "runtime_max", "node_max_fraction"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.runtime_max < self.runtime_min:
            raise ValueError("runtime_max < runtime_min")
        if self.walltime_overestimate_max < 1:
            raise ValueError("walltime_overestimate_max must be >= 1")
        if self.node_max_fraction > 1 or any(not 0 < f <= 1 for f in self.demand_max_fraction):
            raise ValueError("demand fractions must lie in (0, 1]")
        if any(not 0 <= p <= 1 for p in self.zero_probability):
            raise ValueError("zero probabilities must lie in [0, 1]")


@dataclass(frozen=True)
class Issue:
    job_id: int
    message: str
    fatal: bool


@dataclass
class ValidationReport:
    jobs: list = field(default_factory=list)
    issues: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not any(issue.fatal for issue in self.issues)

    @property
    def warnings(self):
        return [i for i in self.issues if not i.fatal]

    @property
    def errors(self):
        return [i for i in self.issues if i.fatal]


def validate_jobs(jobs: Iterable[Job], spec: SystemSpec) -> ValidationReport:
    """Check jobs against ``spec``.

    Runtimes longer than the requested walltime are clamped to the walltime and
    reported as warnings. Anything that makes a job unrunnable (wrong number of
    dimensions, no nodes, negative demand, demand above capacity) is fatal.
    The returned report carries the (possibly clamped) jobs.
    """
    report = ValidationReport()
    seen = set()
    for job in jobs:
        fatal = []
        if job.id in seen:
            fatal.append(f"duplicate job id {job.id}")
        seen.add(job.id)
        if job.id < 0:
            fatal.append("job id must be non-negative")
        if job.submit_time < 0:
            fatal.append("submit_time must be non-negative")
        if not job.requested_walltime > 0:
            fatal.append("requested_walltime must be positive")
        if not job.actual_runtime > 0:
            fatal.append("actual_runtime must be positive")
        if len(job.demand) != spec.ndim:
            fatal.append(f"expected {spec.ndim} demand values, got {len(job.demand)}")
        else:
            if job.demand[0] < 1:
                fatal.append("job needs at least one node")
            for name, need, cap in zip(spec.dimension_names, job.demand, spec.capacity):
                if need < 0:
                    fatal.append(f"negative demand in {name}")
                elif need > cap:
                    fatal.append(f"demand {need} exceeds capacity {cap} in {name}")
        for msg in fatal:
            report.issues.append(Issue(job.id, msg, True))
        if fatal:
            continue
        if job.actual_runtime > job.requested_walltime:
            report.issues.append(
                Issue(
                    job.id,
                    f"runtime {job.actual_runtime} clamped to walltime {job.requested_walltime}",
                    False,
                )
            )
            job = replace(job, actual_runtime=job.requested_walltime)
        report.jobs.append(job)
    return report


def _sort_key(job: Job):
    return (job.submit_time, job.id)


def parse_trace(text: str | Iterable[str], spec: SystemSpec) -> list[Job]:
    """Parse trace text into validated jobs sorted by (submit_time, id).

    Raises:
        TraceParseError: malformed header or job line.
        TraceValidationError: a job that can never run on ``spec``.
    """
    lines = text.splitlines() if isinstance(text, str) else list(text)
    dims = None
    jobs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(HEADER_PREFIX):
            if dims is not None:
                raise TraceParseError(lineno, "duplicate #dims header")
            dims = tuple(name.strip() for name in line[len(HEADER_PREFIX):].split(","))
            if any(not d for d in dims):
                raise TraceParseError(lineno, "empty dimension name in header")
            if dims != spec.dimension_names:
                raise TraceParseError(
                    lineno, f"trace dimensions {dims} do not match system {spec.dimension_names}"
                )
            continue
        if line.startswith("#"):
            continue
        if dims is None:
            raise TraceParseError(lineno, "missing '#dims:' header before first job")
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 4 + len(dims):
            raise TraceParseError(lineno, f"expected {4 + len(dims)} columns, got {len(fields)}")
        try:
            values = [_number(f) for f in fields]
        except ValueError as exc:
            raise TraceParseError(lineno, str(exc)) from None
        if not isinstance(values[0], int):
            raise TraceParseError(lineno, f"job id must be an integer, got {fields[0]!r}")
        jobs.append(Job(values[0], values[1], values[2], values[3], tuple(values[4:])))
    if dims is None and lines:
        raise TraceParseError(1, "missing '#dims:' header")

    report = validate_jobs(jobs, spec)
    if not report.ok:
        msgs = "; ".join(f"job {i.job_id}: {i.message}" for i in report.errors)
        raise TraceValidationError(msgs)
    return sorted(report.jobs, key=_sort_key)


def format_trace(jobs: Sequence[Job], spec: SystemSpec) -> str:
    out = [HEADER_PREFIX + ",".join(spec.dimension_names)]
    out.append("# id,submit_time,requested_walltime,actual_runtime," + ",".join(
        f"demand{d}" for d in range(spec.ndim)))
    for j in jobs:
        row = (j.id, j.submit_time, j.requested_walltime, j.actual_runtime, *j.demand)
        out.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(out) + "\n"


def read_trace(path, spec: SystemSpec) -> list[Job]:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read(), spec)


def write_trace(path, jobs: Sequence[Job], spec: SystemSpec) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_trace(jobs, spec))


def trace_digest(jobs: Sequence[Job], spec: SystemSpec) -> str:
    """SHA-256 of the canonical serialization, used to pair comparable runs."""
    canon = format_trace(sorted(jobs, key=_sort_key), spec)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def generate_synthetic(cfg: GenConfig, spec: SystemSpec) -> list[Job]:
    """Draw a synthetic trace. A pure function of ``(cfg, spec)``."""
    n = cfg.job_count
    extra = spec.ndim - 1
    if extra and (len(cfg.demand_max_fraction) < extra or len(cfg.zero_probability) < extra):
        # a single value is broadcast over all non-compute dimensions
        if len(cfg.demand_max_fraction) == 1 and len(cfg.zero_probability) == 1:
            cfg = replace(
                cfg,
                demand_max_fraction=cfg.demand_max_fraction * extra,
                zero_probability=cfg.zero_probability * extra,
            )
        else:
            raise ValueError(f"generator needs demand parameters for {extra} extra dimensions")
    if n == 0:
        return []
    rng = np.random.default_rng(cfg.seed)

    gaps = rng.exponential(cfg.mean_interarrival, size=n)
    gaps[0] = 0.0
    submit = np.floor(np.cumsum(gaps)).astype(np.int64)

    log_rt = rng.uniform(np.log(cfg.runtime_min), np.log(cfg.runtime_max), size=n)
    runtime = np.maximum(1, np.rint(np.exp(log_rt))).astype(np.int64)
    over = rng.uniform(1.0, cfg.walltime_overestimate_max, size=n)
    walltime = np.maximum(runtime, np.ceil(runtime * over)).astype(np.int64)

    columns = []
    node_cap = spec.capacity[0]
    node_hi = max(1, int(math.floor(cfg.node_max_fraction * node_cap)))
    log_nodes = rng.uniform(0.0, np.log(node_hi + 1), size=n)
    nodes = np.clip(np.floor(np.exp(log_nodes)), 1, node_hi).astype(np.int64)
    columns.append(nodes)
    for d in range(1, spec.ndim):
        hi = max(1, int(math.floor(cfg.demand_max_fraction[d - 1] * spec.capacity[d])))
        amount = rng.integers(1, hi + 1, size=n)
        zero = rng.random(size=n) < cfg.zero_probability[d - 1]
        columns.append(np.where(zero, 0, amount).astype(np.int64))

    demand = np.stack(columns, axis=1)
    return [
        Job(
            id=i,
            submit_time=int(submit[i]),
            requested_walltime=int(walltime[i]),
            actual_runtime=int(runtime[i]),
            demand=tuple(int(v) for v in demand[i]),
        )
        for i in range(n)
    ]
