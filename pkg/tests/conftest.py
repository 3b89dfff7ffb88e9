"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    failed = report.failed or (report.when == "call" and report.skipped)
    ok = _results.get(key, True) and not failed
    if report.when == "call" or failed:
        _results[key] = ok


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), ok in sorted(_results.items()):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {num}: {name.replace('_', ' ')}")
