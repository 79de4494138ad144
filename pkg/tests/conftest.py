import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

ACCEPTANCE = []


def record(criterion, ok, detail):
    """Log one acceptance verdict; the terminal summary prints them all."""
    ACCEPTANCE.append((criterion, bool(ok), detail))
    print(("PASS" if ok else "FAIL") + f" {criterion}: {detail}")
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(("PASS" if ok else "FAIL") + f" {criterion}: {detail}")
