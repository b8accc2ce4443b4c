import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from rome.policies import Window  # noqa: E402
from rome.trace import Job, SystemSpec  # noqa: E402


def make_window(demands, time=0.0):
    return Window(tuple(Job(i, 0, 100, 100, tuple(d)) for i, d in enumerate(demands)), time)


def job(id, submit=0, runtime=100, demand=(1, 0), walltime=None):
    return Job(id, submit, walltime if walltime is not None else runtime, runtime, tuple(demand))


@pytest.fixture
def spec_8_16():
    return SystemSpec(("nodes", "bb_gb"), (8, 16))


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE = []


def record_criterion(number, title, ok, detail=""):
    ACCEPTANCE.append((number, title, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title}: {detail}")
