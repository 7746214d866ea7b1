import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from digitforge.algnum import IntPolynomial, normalize_unit, validate  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def sqrt2m1():
    return normalize_unit(validate(IntPolynomial((-2, 0, 1)), 1, 2))


@pytest.fixture
def sqrt3m1():
    return normalize_unit(validate(IntPolynomial((-3, 0, 1)), 1, 2))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
