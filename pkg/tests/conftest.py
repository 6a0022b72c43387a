import sys

import pytest

from peerclass.service import Platform, PlatformConfig


@pytest.fixture
def platform():
    return Platform(PlatformConfig(admin_enabled=True))


def pytest_terminal_summary(terminalreporter):
    # replay the acceptance-gate lines after capture is torn down
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "GATE_LINES", None)
    if lines:
        terminalreporter.section("acceptance gate")
        for line in lines:
            terminalreporter.write_line(line)
