import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from laplab import RadialGrid, soft_power

settings.register_profile("laplab", deadline=None, max_examples=25, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("laplab")


@pytest.fixture(scope="session")
def spec():
    return soft_power()


@pytest.fixture(scope="session")
def spec_q():
    return soft_power(q={"family": "soft_power_sr", "C": 0.1})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def uniform_grid(r_max=10.0, n=2001, dim=3, r_min=0.0):
    return RadialGrid(np.linspace(r_min, r_max, n), dim)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
