"""Collects outcomes of tests marked ``acceptance(n, title)`` and prints one
PASS/FAIL line per criterion at the end of the run."""
import time

import pytest

RUNTIME_BUDGET = 60.0  # seconds, whole suite

_outcomes: dict = {}
_titles: dict = {}
_start = [0.0]
_elapsed = [0.0]


def pytest_sessionstart(session):
    _start[0] = time.perf_counter()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (report.when != "call" and report.passed):
        return
    number, title = mark.args
    _titles[number] = title
    _outcomes.setdefault(number, []).append(report.passed and not report.skipped)


def pytest_sessionfinish(session, exitstatus):
    _elapsed[0] = time.perf_counter() - _start[0]
    if 6 in _outcomes and _elapsed[0] >= RUNTIME_BUDGET and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_outcomes):
        results = _outcomes[number]
        ok = all(results)
        detail = f"{sum(results)}/{len(results)} checks"
        if number == 6:
            within = _elapsed[0] < RUNTIME_BUDGET
            ok = ok and within
            detail += f", suite {_elapsed[0]:.1f}s (budget {RUNTIME_BUDGET:.0f}s)"
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {_titles[number]}  [{detail}]")
