from __future__ import annotations

import numpy as np
import pytest

from randsum_zeros.basis import FAMILY_NAMES, BasisFamily

# filled by test_acceptance; printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def family(name: str, n: int = 10) -> BasisFamily:
    return BasisFamily.from_name(name, n)


ALL_FAMILIES = [family(name) for name in FAMILY_NAMES]
