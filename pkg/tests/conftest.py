import sys

import pytest

from casmodes.optics import MirrorModel


@pytest.fixture(scope="session")
def model():
    return MirrorModel(1.0)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance verdict lines after the test report."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
