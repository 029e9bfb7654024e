"""Shared fixtures plus the end-of-run acceptance summary section."""

import pytest

_CRITERIA = []
_EXTRA = []


@pytest.fixture(scope="session")
def record_criterion():
    """Collect one PASS/FAIL line per acceptance check for the final summary."""

    def rec(number: int, title: str, passed: bool, detail: str) -> None:
        word = "PASS" if passed else "FAIL"
        _CRITERIA.append(f"[{word}] {number:02d} {title}: {detail}")

    return rec


@pytest.fixture(scope="session")
def record_extra():
    """Collect outcome lines for registry targets outside the acceptance set."""

    def rec(name: str, passed: bool, detail: str) -> None:
        word = "PASS" if passed else "FAIL"
        _EXTRA.append(f"[{word}] {name}: {detail}")

    return rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
    if _EXTRA:
        terminalreporter.section("additional verification targets")
        for line in _EXTRA:
            terminalreporter.write_line(line)
