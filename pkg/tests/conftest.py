"""Shared pytest wiring: acceptance criterion reporting."""

import pytest

_acceptance_outcomes: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): marks a test as one acceptance criterion"
    )
    config.addinivalue_line(
        "markers", "slow: long-running scenario (deselect with -m 'not slow')"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        _acceptance_outcomes[marker.args[0]] = report.passed


def pytest_terminal_summary(terminalreporter, exitstatus):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in _acceptance_outcomes.items():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
