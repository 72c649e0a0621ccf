import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {line}")


@pytest.fixture
def record_acceptance():
    """Register one PASS/FAIL line; call with (number, ok, description)."""

    def record(number, ok, line):
        ACCEPTANCE.append((number, bool(ok), line))
        print(f"[{'PASS' if ok else 'FAIL'}] {number}. {line}")

    return record
