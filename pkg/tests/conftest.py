import numpy as np
import pytest

from sterngerlach import default_config, derive


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def derived(config):
    return derive(config)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
