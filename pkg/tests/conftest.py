"""Shared test fixtures and the acceptance-line reporter.

Acceptance tests record one human-readable PASS/FAIL line each; the
terminal-summary hook prints them in a dedicated section so the verdicts
survive pytest's output capture.
"""

import pytest

_ACCEPTANCE_LINES: list[str] = []


def _record(name: str, ok: bool, detail: str) -> None:
    _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  [{detail}]")


@pytest.fixture(scope="session")
def acceptance_log():
    """Callable (name, ok, detail) -> None collecting one verdict line per criterion."""
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
