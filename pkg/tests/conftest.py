import pytest

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion with a one-line report")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and (report.when == "call" or report.failed):
        _acceptance.append((marker.args[0], report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed in _acceptance:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}")
