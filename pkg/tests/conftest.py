import pytest

_LINES: dict[int, str] = {}


def record_criterion(num: int, passed: bool, detail: str) -> None:
    _LINES[num] = f"criterion {num:02d} {'PASS' if passed else 'FAIL'}: {detail}"


@pytest.fixture
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for num in sorted(_LINES):
            terminalreporter.write_line(_LINES[num])
