import os
import sys
import time

sys.path.insert(0, os.path.dirname(__file__))

SUITE_BUDGET_S = 600
_lines = []
_start = [0.0]


def record_criterion(number, ok, detail):
    """Collect one PASS/FAIL line for the end-of-run acceptance summary."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    _lines.append(line)
    print(line)


def pytest_sessionstart(session):
    _start[0] = time.monotonic()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _lines:
        return
    elapsed = time.monotonic() - _start[0]
    terminalreporter.section("acceptance criteria")
    for line in sorted(_lines, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
    ok = elapsed < SUITE_BUDGET_S
    terminalreporter.write_line(
        f"{'PASS' if ok else 'FAIL'} criterion 8 (runtime): full run took {elapsed:.0f} s, "
        f"budget {SUITE_BUDGET_S} s")
