from pathlib import Path

import pytest

import prefgames

INSTANCES = Path(prefgames.__file__).parent / "instances"

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture
def instance_path():
    return lambda name: str(INSTANCES / f"{name}.json")


def pytest_runtest_logreport(report):
    marks = [m for m in getattr(report, "_criterion", ())]
    if not marks:
        return
    n = marks[0]
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _CRITERIA.get(n, True)
    if report.when == "call" or report.failed:
        _CRITERIA[n] = prev and not failed


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result()._criterion = (mark.args[0],)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(f"ACCEPTANCE criterion {n}: {'PASS' if _CRITERIA[n] else 'FAIL'}")
