import os

import pytest
from hypothesis import HealthCheck, settings

from curvibc.metrics import MeanFlow, Metric
from curvibc.sampling import samples

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def cart():
    return Metric.cartesian()


@pytest.fixture
def flow05():
    return MeanFlow(0.5, 0.0, 0.0)


@pytest.fixture(scope="session")
def draws():
    """Seeded general-metric samples shared by the oracle tests."""
    return samples(seed=7, n=200)


@pytest.fixture(scope="session")
def ortho_draws():
    return samples(seed=11, n=20, orthogonal=True)

