import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gaussent import beamsplitter_channel, euler_compose

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# criterion lines collected by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def reference_channel():
    return beamsplitter_channel(math.pi / 6, 3.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_single_mode(rng, r_max=1.0):
    """Random single-mode symplectic matrix from seeded Euler angles."""
    return euler_compose(rng.uniform(-math.pi, math.pi), rng.uniform(-r_max, r_max),
                         rng.uniform(-math.pi, math.pi))
