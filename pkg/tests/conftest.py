import pytest
from hypothesis import HealthCheck, settings

from modyangian.gaussian import GaussianSet
from modyangian.rtt import close_ideal

settings.register_profile("repo", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.function_scoped_fixture])
settings.load_profile("repo")

_BASES = {}


def basis(N, p, D):
    key = (N, p, D)
    if key not in _BASES:
        _BASES[key] = close_ideal(None, N, p, D)
    return _BASES[key]


@pytest.fixture(scope="session")
def qb335():
    return basis(3, 3, 5)


@pytest.fixture(scope="session")
def qb435():
    return basis(4, 3, 5)


@pytest.fixture(scope="session")
def gs335(qb335):
    return GaussianSet(qb335, 3)


@pytest.fixture(scope="session")
def gs435(qb435):
    return GaussianSet(qb435, 3)
