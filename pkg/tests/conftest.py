import sys
from pathlib import Path

import pytest

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def golden_dir():
    return GOLDEN


def pytest_configure(config):
    # the acceptance lines go to stdout; keep them visible under -v
    sys.stdout.reconfigure(line_buffering=True)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, line

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        terminalreporter.write_line(line(num, *RESULTS[num]))
