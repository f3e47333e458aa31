"""Shared test plumbing.

The acceptance tests register one PASS/FAIL line apiece; the hook below
re-prints them as a terminal section so the verdicts are visible in a
plain ``pytest -v`` run without -s.
"""

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
