import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ag23():
    from assisted_qldpc.galois import ag_lines
    return ag_lines(2, 3)


@pytest.fixture(scope="session")
def fano():
    from assisted_qldpc.galois import pg_lines
    return pg_lines(2, 2)


@pytest.fixture(scope="session")
def ag43():
    from assisted_qldpc.galois import ag_lines
    return ag_lines(4, 3)
