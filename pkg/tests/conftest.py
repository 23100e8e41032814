import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from bigjump import exactprob, weights  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def stretched():
    return exactprob.normalized(weights.make_stretched(0.5))


@pytest.fixture(scope="session")
def loghazard():
    return exactprob.normalized(weights.make_loghazard(3.0))


@pytest.fixture(scope="session")
def geometric():
    return exactprob.normalized(weights.make_geometric(0.5))


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import lines

    out = lines()
    if out:
        terminalreporter.section("acceptance criteria")
        for line in out:
            terminalreporter.write_line(line)
