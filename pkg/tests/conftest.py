import pytest
from hypothesis import HealthCheck, settings

from polymean.chareq import CharacteristicFn
from polymean.zeroscan import find_zeros

PARAMS_GRID = [(1, 0), (2, 0), (2, 1), (3, 1), (3, 2)]

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalogs():
    """Certified catalogs up to 40 for the whole parameter grid, computed once."""
    return {ms: find_zeros(CharacteristicFn(*ms), 40.0, seed=0) for ms in PARAMS_GRID}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
