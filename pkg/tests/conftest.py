import numpy as np
import pytest
from hypothesis import settings

from qubitrecon import AffineChannel

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("repo")


EXAMPLE_CHANNEL = AffineChannel((0.5, 0.0, 0.0), [[0.2, -0.1, 0.1], [0.2, 0.0, -0.3], [0.0, 0.3, 0.3]])
EXAMPLE_INPUTS = ((0.6, 0.0, 0.0), (0.4, 0.1, 0.8), (0.4, 0.3, 0.6))


@pytest.fixture
def example_channel():
    return EXAMPLE_CHANNEL


@pytest.fixture
def example_records():
    return [(v, EXAMPLE_CHANNEL(v)) for v in EXAMPLE_INPUTS]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
