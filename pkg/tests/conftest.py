"""Collects acceptance verdict lines and prints them after the run."""

ACCEPTANCE_LINES = []


def record_criterion(number, name, ok):
    ACCEPTANCE_LINES.append(f"criterion {number:02d} {name}: {'PASS' if ok else 'FAIL'}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
