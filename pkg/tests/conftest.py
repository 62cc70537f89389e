import csv
from pathlib import Path

import pytest

from frcore import build_grid, parse_atom_data, parse_levels, parse_model_file, resolve_data_path

DATA = Path(__file__).parent / "data"

# acceptance lines collected by tests/test_acceptance.py, echoed in the summary
ACCEPTANCE_LINES = []


def read_reference(name):
    """Rows of a reference CSV under tests/data, comments skipped."""
    with open(DATA / name) as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    return rows


def read_scalars(name="published_scalars.txt"):
    out = {}
    for line in (DATA / name).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            k, v = (s.strip() for s in line.split("=", 1))
            out[k] = float(v)
    return out


@pytest.fixture(scope="session")
def valence_grid():
    return build_grid(1e-5, 250.0, 4000)


@pytest.fixture(scope="session")
def coulomb_grid():
    return build_grid(1e-5, 800.0, 8000)


@pytest.fixture(scope="session")
def fr_mp():
    return parse_model_file(resolve_data_path("fr_mp"))


@pytest.fixture(scope="session")
def fr_pp():
    return parse_model_file(resolve_data_path("fr_pp"))


@pytest.fixture(scope="session")
def fr_levels():
    return parse_levels(resolve_data_path("fr_levels.csv"))


@pytest.fixture(scope="session")
def fr_levels_avg():
    return parse_levels(resolve_data_path("fr_levels_avg.csv"))


@pytest.fixture(scope="session")
def atoms():
    return parse_atom_data()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
