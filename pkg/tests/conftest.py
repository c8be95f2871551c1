import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from vqesim.pipeline import prepare_problem

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

# one line per acceptance criterion, echoed in the terminal summary
CRITERION_LINES = []


def record_criterion(number, name, passed, detail=""):
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:02d} [{status}] {name}"
    if detail:
        line += f" - {detail}"
    CRITERION_LINES.append(line)
    assert passed, line


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def h2_path():
    return os.path.join(DATA_DIR, "h2.fcidump")


@pytest.fixture(scope="session")
def toy4_path():
    return os.path.join(DATA_DIR, "toy4.fcidump")


@pytest.fixture(scope="session")
def h2_sidecar_path():
    return os.path.join(DATA_DIR, "h2_noons.json")


@pytest.fixture(scope="session")
def toy4_sidecar_path():
    return os.path.join(DATA_DIR, "toy4_noons.json")


@pytest.fixture(scope="session")
def h2_problem(h2_path):
    return prepare_problem(h2_path)


@pytest.fixture(scope="session")
def toy4_problem(toy4_path):
    return prepare_problem(toy4_path)
