import pytest

from polybound.catalog import catalog

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        crit = report.user_properties and dict(report.user_properties).get("criterion")
        if crit:
            ok = report.outcome == "passed" and _results.get(crit, "PASS") == "PASS"
            _results[crit] = "PASS" if ok else "FAIL"


@pytest.fixture(autouse=True)
def _tag_criterion(request):
    m = request.node.get_closest_marker("criterion")
    if m:
        request.node.user_properties.append(("criterion", (m.args[0], m.args[1])))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, text), status in sorted(_results.items()):
        terminalreporter.write_line(f"{status} criterion {n}: {text}")


@pytest.fixture(scope="session")
def finite_catalog():
    return catalog()
