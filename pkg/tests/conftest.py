import time

import pytest

from motivic_tori.scenarios import default_context

SUITE_BUDGET_S = 10.0

_outcomes = {}
_start = [None]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by a test")
    _start[0] = time.perf_counter()


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        ok, title = _outcomes.get(crit[0], (True, crit[1]))
        _outcomes[crit[0]] = (ok and report.outcome == "passed", title)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(_outcomes, key=lambda c: (int(str(c).split("-")[0]), str(c))):
        ok, title = _outcomes[cid]
        tr.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {title}")
    elapsed = time.perf_counter() - _start[0]
    verdict = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
    tr.write_line(f"suite wall time {elapsed:.2f} s (budget {SUITE_BUDGET_S:.0f} s): {verdict}")


@pytest.fixture(scope="session")
def ctx():
    return default_context()
