import math

import pytest

from relaxosc import NonIdealityProfile, builtin_catalog, lookup, reference_config

GRID_RX = tuple(k * 100e3 for k in range(1, 11))
GRID_CX = tuple(float(f"{c}e-12") for c in range(10, 43, 4))
GRID = [(rx, cx) for rx in GRID_RX for cx in GRID_CX]

OPA177_A0W0 = 2 * math.pi * 0.6e6


@pytest.fixture
def cfg():
    return reference_config()


@pytest.fixture
def opa177():
    return lookup("OPA177")


@pytest.fixture
def opa177_full(opa177):
    return NonIdealityProfile.from_opamp(opa177)


@pytest.fixture
def opa177_gbw(opa177):
    return NonIdealityProfile.from_opamp(opa177, {"GBW"})


def catalog_profiles():
    return [NonIdealityProfile.from_opamp(op) for op in builtin_catalog()]


# Acceptance verdicts collected by tests/test_acceptance.py.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
