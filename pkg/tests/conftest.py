import numpy as np
import pytest

from lintrans.field import make_tower


@pytest.fixture(scope="session")
def F4():
    return make_tower(2, 1, 2)


@pytest.fixture(scope="session")
def F8():
    return make_tower(2, 1, 3)


@pytest.fixture(scope="session")
def F9():
    return make_tower(3, 1, 2)


@pytest.fixture(scope="session")
def F16():
    return make_tower(2, 1, 4)


@pytest.fixture(scope="session")
def F16q4():
    return make_tower(2, 2, 2)


@pytest.fixture(scope="session")
def F25():
    return make_tower(5, 1, 2)


@pytest.fixture(scope="session")
def F27():
    return make_tower(3, 1, 3)


@pytest.fixture(scope="session")
def F81():
    return make_tower(3, 1, 4)


@pytest.fixture(scope="session")
def F81q9():
    return make_tower(3, 2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and (report.when == "call" or report.failed):
        name = report.nodeid.split("::")[-1]
        number = int(name.split("_")[2])
        _ACCEPTANCE.setdefault(number, []).append(report.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        runs = _ACCEPTANCE[number]
        verdict = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict} ({sum(runs)}/{len(runs)} cases)")
