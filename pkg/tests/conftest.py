import numpy as np
import pytest

from gpbt.hyperspace import DimensionSpec, SearchSpace

_CRITERIA: list[tuple[str, str, str]] = []
_DETAILS: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        _CRITERIA.append((str(marker.args[0]), marker.args[1], status))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status in sorted(_CRITERIA, key=lambda c: int(c[0])):
        terminalreporter.write_line(f"criterion {number}: {status}  {title}")
        for line in _DETAILS.get(number, []):
            terminalreporter.write_line(f"    {line}")


@pytest.fixture
def acceptance_log(request):
    """Attach measured values to the criterion's summary line."""
    number = str(request.node.get_closest_marker("criterion").args[0])

    def log(text):
        _DETAILS.setdefault(number, []).append(text)
        print(text)

    return log


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_box():
    return SearchSpace([DimensionSpec("h1", 0.0, 1.0), DimensionSpec("h2", 0.0, 1.0)])


@pytest.fixture
def mixed_space():
    return SearchSpace(
        [
            DimensionSpec("lr", 1e-5, 1e-3, scale="log"),
            DimensionSpec("gamma", 0.9, 1.0),
            DimensionSpec("batch", 16, 256, kind="integer"),
        ]
    )
