import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ofdm_papr.config import SimulationConfig  # noqa: E402


@pytest.fixture
def table1():
    """Default simulation parameters (BW 1 MHz, L 8, fc 2 MHz, N 128, CP 32)."""
    return SimulationConfig()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
