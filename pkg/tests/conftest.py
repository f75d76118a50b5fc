import pytest

from quatlat.catalog import load_preset, preset_names

ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def presets():
    return {n: load_preset(n) for n in preset_names()}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
