import json
import subprocess
import sys

import pytest

from rome.cli import run_cli
from rome.trace import SystemSpec, read_trace

SYSTEM = ["--nodes", "8", "--dims", "bb_gb=16"]


@pytest.fixture
def trace(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text(
        "#dims:nodes,bb_gb\n"
        "1,0,3600,1800,4,10\n"
        "2,0,3600,600,4,8\n"
        "3,10,600,300,2,0\n"
        "4,20,600,600,8,16\n"
    )
    return path


def test_simulate_writes_report(trace, tmp_path):
    out = tmp_path / "report.json"
    argv = ["simulate", "--trace", str(trace), *SYSTEM, "--policy", "fcfs", "--window", "20",
            "--seed", "7", "--out", str(out)]
    assert run_cli(argv) == 0
    rep = json.loads(out.read_text())
    assert {"config", "utilization", "wait_times", "instances"} <= rep.keys()
    assert rep["config"]["seed"] == 7
    assert set(rep["jobs"]) == {"1", "2", "3", "4"}


def test_simulate_csv_series(trace, tmp_path):
    out = tmp_path / "series.csv"
    assert run_cli(["simulate", "--trace", str(trace), *SYSTEM, "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "time,nodes,bb_gb"
    assert lines[-1].endswith(",0,0")


def test_simulate_missing_trace_flag(capsys):
    assert run_cli(["simulate", *SYSTEM]) != 0
    assert "--trace" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert run_cli(["simulate", "--trace", str(tmp_path / "nope.csv"), *SYSTEM]) == 1
    assert "cannot read trace" in capsys.readouterr().err


def test_unknown_flag(trace):
    assert run_cli(["simulate", "--trace", str(trace), *SYSTEM, "--bogus"]) != 0


def test_bad_dims(trace, capsys):
    assert run_cli(["simulate", "--trace", str(trace), "--nodes", "8", "--dims", "bb_gb"]) == 1
    assert "name=capacity" in capsys.readouterr().err


def test_trace_over_capacity(trace, capsys):
    assert run_cli(["simulate", "--trace", str(trace), "--nodes", "4", "--dims", "bb_gb=16"]) == 1
    assert "job 4" in capsys.readouterr().err


@pytest.mark.parametrize("budget", ["30.5", "0", "-1"])
def test_budget_above_ceiling_rejected(trace, budget):
    assert run_cli(["simulate", "--trace", str(trace), *SYSTEM, "--ga-budget-secs", budget]) != 0


def test_invalid_ga_population(trace, capsys):
    assert run_cli(["simulate", "--trace", str(trace), *SYSTEM, "--ga-pop", "7"]) == 1
    assert "population_size" in capsys.readouterr().err


def test_compare_emits_comparison(trace, tmp_path):
    out = tmp_path / "cmp.json"
    assert run_cli(["compare", "--trace", str(trace), *SYSTEM, "--seed", "3", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    cmp = rep["comparison"]
    assert cmp["candidate"] == "rome" and cmp["baseline"] == "fcfs"
    assert set(cmp["utilization"]) == {"nodes", "bb_gb"}
    assert "sign_convention" in cmp


def test_gen_trace_round_trip(tmp_path):
    out = tmp_path / "g.csv"
    argv = ["gen-trace", "--nodes", "64", "--dims", "bb_gb=512,mem=32", "--jobs", "40", "--seed", "5",
            "--out", str(out)]
    assert run_cli(argv) == 0
    jobs = read_trace(out, SystemSpec(("nodes", "bb_gb", "mem"), (64, 512, 32)))
    assert len(jobs) == 40
    first = out.read_text()
    assert run_cli(argv) == 0
    assert out.read_text() == first


def test_oracle_check_small(capsys):
    assert run_cli(["oracle-check", "--w", "6", "--instances", "4", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert out.count("hv_ratio") == 4
    assert "PASS" in out


def test_oracle_check_fails_when_threshold_unreachable(capsys):
    assert run_cli(["oracle-check", "--w", "6", "--instances", "3", "--threshold", "1.01"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_module_entry_point_and_log_env(trace, tmp_path):
    out = tmp_path / "r.json"
    proc = subprocess.run(
        [sys.executable, "-m", "rome", "simulate", "--trace", str(trace), *SYSTEM, "--out", str(out)],
        capture_output=True,
        text=True,
        env={"ROME_LOG": "DEBUG", "PATH": ""},
    )
    assert proc.returncode == 0, proc.stderr
    assert "DEBUG rome.simcore" in proc.stderr
    assert out.exists()
