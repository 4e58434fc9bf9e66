import time

import pytest

SUITE_BUDGET = 300.0

_results: dict[int, tuple[str, str]] = {}
_start = [time.perf_counter()]


def pytest_configure(config):
    _start[0] = time.perf_counter()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        prev = _results.get(number)
        if prev is None or prev[0] == "PASS":
            _results[number] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    elapsed = time.perf_counter() - _start[0]
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        status, title = _results[number]
        tr.write_line(f"criterion {number:2d}: {status}  {title}")
    budget = "PASS" if elapsed < SUITE_BUDGET else "FAIL"
    tr.write_line(f"suite runtime: {budget}  {elapsed:.1f} s (budget {SUITE_BUDGET:.0f} s)")
