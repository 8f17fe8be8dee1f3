from __future__ import annotations

import os

os.environ.setdefault("QAOA_KIT_THREADS", "1")

_LINES: dict[int, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for name, value in report.user_properties:
        if name == "acceptance":
            k, line = value
            _LINES[k] = line


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_LINES):
        terminalreporter.write_line(_LINES[k])
