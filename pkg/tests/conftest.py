import os

import pytest

from simplicia.suites import from_selector

os.environ.setdefault("SOURCE_DATE_EPOCH", "0")

_ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_runtest_logreport(report):
    for key, value in report.user_properties:
        if key == "acceptance":
            _ACCEPTANCE_LINES[report.nodeid] = value


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES.values(), key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture
def acceptance(record_property):
    """Record a one-line verdict; call before asserting so failures are reported too."""

    def record(number: int, title: str, checks: dict, seconds: float) -> bool:
        ok = all(bool(v) for v in checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({seconds:.2f} s)"
        if failed:
            line += "  failed: " + ", ".join(failed)
        record_property("acceptance", line)
        print(line)
        return ok

    return record


@pytest.fixture
def problem():
    return from_selector
