import numpy as np
import pytest
from hypothesis import settings

from epochma.config import bundled_dataset
from epochma.market import build_universe, universe_from_csv

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("fast", max_examples=25, deadline=None)
settings.load_profile("ci")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def bundled_universe():
    return universe_from_csv(bundled_dataset())


@pytest.fixture
def small_universe():
    rng = np.random.default_rng(7)
    returns = rng.normal(0.01, 0.05, size=(40, 6)) + rng.normal(0, 0.03, size=(40, 1))
    return build_universe(returns, 0.0)
