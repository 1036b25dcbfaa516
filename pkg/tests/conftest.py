import pytest

_acceptance = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion label")


@pytest.fixture
def measured(request):
    """Attach measured values to the acceptance summary line."""
    def add(text):
        request.node.user_properties.append(("measured", text))
    return add


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    label = dict(report.user_properties).get("criterion")
    if label is None:
        return
    notes = [v for k, v in report.user_properties if k == "measured"]
    _acceptance.append((label, report.outcome, "; ".join(notes)))


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, notes in _acceptance:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}" + (f"  ({notes})" if notes else ""))
