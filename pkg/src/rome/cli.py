"""Command-line entry point: ``python -m rome <subcommand> ...``.

Subcommands:
    simulate      run one scheduler over a trace and write a report
    compare       run ROME and the FCFS baseline on the same trace
    gen-trace     write a seeded synthetic trace
    oracle-check  GA vs exact-front hypervolume harness

Set ``ROME_LOG`` (DEBUG, INFO, WARNING, ...) to control diagnostics.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys

from rome.decision import AGGREGATIONS, PreferenceConfig
from rome.metrics import build_report, compare_runs, dumps_report
from rome.moga import MAX_TIME_BUDGET, GaParams
from rome.oracle import oracle_check
from rome.policies import POLICIES, WindowConfig
from rome.simcore import SchedulerConfig, run_simulation
from rome.trace import GenConfig, SystemSpec, generate_synthetic, read_trace, write_trace

log = logging.getLogger("rome")


class CliError(Exception):
    pass


def _parse_dims(text: str | None) -> list[tuple[str, float]]:
    if not text:
        return []
    out = []
    for part in text.split(","):
        name, sep, cap = part.partition("=")
        if not sep or not name.strip():
            raise CliError(f"--dims entry {part!r} is not name=capacity")
        try:
            value = int(cap)
        except ValueError:
            try:
                value = float(cap)
            except ValueError:
                raise CliError(f"--dims capacity {cap!r} is not a number") from None
        out.append((name.strip(), value))
    return out


def _spec(args) -> SystemSpec:
    dims = _parse_dims(args.dims)
    try:
        return SystemSpec(("nodes", *(n for n, _ in dims)), (args.nodes, *(c for _, c in dims)))
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _budget(text: str) -> float:
    value = float(text)
    if not 0 < value <= MAX_TIME_BUDGET:
        raise argparse.ArgumentTypeError(f"must be in (0, {MAX_TIME_BUDGET:g}] seconds")
    return value


def _add_system(p):
    p.add_argument("--nodes", type=int, required=True, help="compute node count")
    p.add_argument("--dims", help="extra resources as name=capacity[,name=capacity...]")


def _add_scheduler(p):
    p.add_argument("--trace", required=True, help="trace file")
    _add_system(p)
    p.add_argument("--policy", choices=POLICIES, default="fcfs")
    p.add_argument("--window", type=int, default=20)
    p.add_argument("--ga-pop", type=int, default=64)
    p.add_argument("--ga-gens", type=int, default=128)
    p.add_argument("--ga-budget-secs", type=_budget, default=1.0)
    p.add_argument("--workers", type=int, default=1, help="solver evaluation threads")
    p.add_argument("--solver", choices=("ga", "exact"), default="ga")
    p.add_argument("--alpha", type=float, default=0.10)
    p.add_argument("--beta", type=float, default=0.40)
    p.add_argument("--aggregation", choices=AGGREGATIONS, default="mean")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--timings", action="store_true", help="include solver wall-clock times")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rome", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scheduler over a trace")
    _add_scheduler(p)
    p.add_argument("--scheduler", choices=("rome", "fcfs"), default="rome")

    p = sub.add_parser("compare", help="ROME vs the FCFS baseline on one trace")
    _add_scheduler(p)

    p = sub.add_parser("gen-trace", help="write a synthetic trace")
    _add_system(p)
    p.add_argument("--jobs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mean-interarrival", type=float, default=60.0)
    p.add_argument("--runtime-min", type=float, default=60.0)
    p.add_argument("--runtime-max", type=float, default=7200.0)
    p.add_argument("--node-max-fraction", type=float, default=0.5)
    p.add_argument("--demand-max-fraction", type=float, default=0.5)
    p.add_argument("--zero-prob", type=float, default=0.3,
                   help="probability a job requests none of a non-compute resource")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle-check", help="GA vs exact front on random windows")
    p.add_argument("--w", type=int, default=10)
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--capacity", type=int, nargs=2, default=(100, 100), metavar=("NODES", "BB"))
    p.add_argument("--ga-pop", type=int, default=64)
    p.add_argument("--ga-gens", type=int, default=200)
    p.add_argument("--ga-budget-secs", type=_budget, default=1.0)
    p.add_argument("--threshold", type=float, default=0.95)
    p.add_argument("--min-pass", type=float, default=0.96,
                   help="fraction of instances that must reach the threshold")
    return parser


def _scheduler_config(args, kind: str) -> SchedulerConfig:
    try:
        return SchedulerConfig(
            kind=kind,
            window=WindowConfig(args.window, args.policy),
            ga=GaParams(
                population_size=args.ga_pop,
                max_generations=args.ga_gens,
                time_budget=args.ga_budget_secs,
                seed=args.seed,
                workers=args.workers,
            ),
            prefs=PreferenceConfig(args.alpha, args.beta, args.aggregation),
            solver=args.solver,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _echo(args, kind: str) -> dict:
    # worker count and output location do not affect results, so they are not echoed
    return {
        "scheduler": kind,
        "trace": os.path.basename(args.trace),
        "policy": args.policy,
        "window": args.window,
        "solver": args.solver,
        "ga_population": args.ga_pop,
        "ga_generations": args.ga_gens,
        "ga_budget_secs": args.ga_budget_secs,
        "alpha": args.alpha,
        "beta": args.beta,
        "aggregation": args.aggregation,
        "seed": args.seed,
    }


def _series_csv(result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time", *result.spec.dimension_names])
    for t, level in zip(result.times, result.levels):
        writer.writerow([t, *level])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args):
    spec = _spec(args)
    try:
        jobs = read_trace(args.trace, spec)
    except OSError as exc:
        raise CliError(f"cannot read trace: {exc}") from None
    except ValueError as exc:
        raise CliError(f"{args.trace}: {exc}") from None
    return spec, jobs


def cmd_simulate(args) -> int:
    spec, jobs = _load(args)
    cfg = _scheduler_config(args, args.scheduler)
    result = run_simulation(jobs, spec, cfg)
    if args.format == "csv":
        _emit(_series_csv(result), args.out)
    else:
        _emit(dumps_report(build_report(result, _echo(args, args.scheduler), args.timings)), args.out)
    return 0


def cmd_compare(args) -> int:
    spec, jobs = _load(args)
    rome = run_simulation(jobs, spec, _scheduler_config(args, "rome"))
    base = run_simulation(jobs, spec, _scheduler_config(args, "fcfs"))
    report = build_report(rome, _echo(args, "rome"), args.timings)
    baseline = build_report(base, _echo(args, "fcfs"))
    report["comparison"] = compare_runs(report, baseline)
    if args.format == "csv":
        _emit(_series_csv(rome), args.out)
    else:
        _emit(dumps_report(report), args.out)
    return 0


def cmd_gen_trace(args) -> int:
    spec = _spec(args)
    extra = spec.ndim - 1
    try:
        cfg = GenConfig(
            job_count=args.jobs,
            seed=args.seed,
            mean_interarrival=args.mean_interarrival,
            runtime_min=args.runtime_min,
            runtime_max=args.runtime_max,
            node_max_fraction=args.node_max_fraction,
            demand_max_fraction=(args.demand_max_fraction,) * max(extra, 1),
            zero_probability=(args.zero_prob,) * max(extra, 1),
        )
        jobs = generate_synthetic(cfg, spec)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    try:
        write_trace(args.out, jobs, spec)
    except OSError as exc:
        raise CliError(f"cannot write trace: {exc}") from None
    log.info("wrote %d jobs to %s", len(jobs), args.out)
    return 0


def cmd_oracle_check(args) -> int:
    try:
        params = GaParams(args.ga_pop, args.ga_gens, time_budget=args.ga_budget_secs)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    res = oracle_check(args.w, args.instances, args.seed, tuple(args.capacity), params, args.threshold)
    for k, ratio in enumerate(res.ratios):
        print(f"instance {k:3d}  hv_ratio {ratio:.6f}")
    need = math.ceil(args.min_pass * args.instances)
    ok = res.passed >= need
    print(
        f"{res.passed}/{args.instances} instances reach {args.threshold:g} "
        f"(need {need}); {res.seconds:.2f}s -> {'PASS' if ok else 'FAIL'}"
    )
    return 0 if ok else 1


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "gen-trace": cmd_gen_trace,
    "oracle-check": cmd_oracle_check,
}


def run_cli(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("ROME_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"rome {args.command}: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())
