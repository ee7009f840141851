"""Prints one PASS/FAIL line per acceptance criterion after the run."""

import pytest

_criteria = {}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.module.__name__.endswith("test_acceptance"):
            doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
            _criteria[item.nodeid] = doc


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_logreport(report):
    if report.nodeid not in _criteria:
        return
    if report.failed or (report.when == "call" and report.nodeid not in _outcomes):
        _outcomes[report.nodeid] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, doc in _criteria.items():
        terminalreporter.write_line(f"{_outcomes.get(nodeid, 'NOT RUN'):7} {doc}")
