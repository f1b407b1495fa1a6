import numpy as np
import pytest

from roadsense.weather import build_weather_system


@pytest.fixture(scope="session")
def weather_system():
    return build_weather_system()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_configure(config):
    config.acceptance_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when == "teardown":
        return
    info = tuple(marker.args)
    results = item.config.acceptance_results
    if rep.when == "call" or not rep.passed:
        results[info] = "FAIL" if rep.failed else "SKIP" if rep.skipped else "PASS"


def pytest_terminal_summary(terminalreporter, config):
    results = config.acceptance_results
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), status in sorted(results.items()):
        terminalreporter.write_line(f"criterion {number:>2}: {status}  {title}")
