import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ovpframe.frames import FramePair
from ovpframe.harness.generate import GenSpec, generate

settings.register_profile("ovp", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ovp")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def frame():
    return generate(GenSpec(seed=11, p=1.5, d=3, e=2, N=4, rX=3.0, rY=1.5))


@pytest.fixture
def euclid_frame():
    return generate(GenSpec(seed=12, p=2.0, d=3, e=2, N=4))


@pytest.fixture
def two_point():
    """N=2, d=e=1, A = Psi = (1), (1)."""
    return FramePair(np.ones((2, 1, 1)), np.ones((2, 1, 1)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
