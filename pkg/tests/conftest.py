"""Shared pytest plumbing.

The acceptance harness registers one verdict line per criterion here; the
terminal summary hook echoes them after the run so they stay visible even
though pytest captures stdout of passing tests.
"""

ACCEPTANCE_LINES = []


def record_criterion(number: int, label: str, ok: bool) -> bool:
    line = f"[acceptance] criterion {number} ({label}): {'PASS' if ok else 'FAIL'}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.line(line)
