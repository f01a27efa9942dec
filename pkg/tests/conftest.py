import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from abwave.hankel import RadialGrid  # noqa: E402
from abwave.modes import FluxParameter  # noqa: E402

settings.register_profile(
    "abwave", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("abwave")


@pytest.fixture
def flux():
    return FluxParameter(0.5)


@pytest.fixture(scope="session")
def grid():
    """The default transform grid: 2048 Gauss-Legendre nodes on [0, 20]."""
    return RadialGrid.gauss_legendre(2048, 20.0)


@pytest.fixture(scope="session")
def small_grid():
    return RadialGrid.gauss_legendre(512, 20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


def ring(r, center=5.0, width=0.8, k=4.0):
    return np.exp(-0.5 * ((r - center) / width) ** 2) * np.cos(k * r)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
