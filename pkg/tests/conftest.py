import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion a test belongs to")


def pytest_runtest_logreport(report):
    marks = getattr(report, "criterion", None)
    if marks is None:
        return
    number, title = marks
    entry = _criteria.setdefault(
        number, {"title": title, "passed": 0, "failed": 0, "tests": 0, "measured": []}
    )
    if report.when == "call" or (report.when == "setup" and not report.passed):
        entry["tests"] += 1
        entry["passed" if report.passed else "failed"] += 1
        entry["measured"] += [f"{k}={v}" for k, v in report.user_properties]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["failed"] == 0 and e["passed"] > 0 else "FAIL"
        terminalreporter.write_line(
            f"{status} criterion {number}: {e['title']} ({e['passed']}/{e['tests']} checks)"
        )
        for m in e["measured"]:
            terminalreporter.write_line(f"    {m}")
