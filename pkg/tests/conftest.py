import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_RESULTS = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the test still asserts on its own."""
    def record(number, label, ok, detail=""):
        _RESULTS.append((number, label, bool(ok), detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, label, ok, detail in sorted(_RESULTS, key=lambda r: str(r[0])):
        status = "PASS" if ok else "FAIL"
        extra = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"[{status}] criterion {number}: {label}{extra}")
