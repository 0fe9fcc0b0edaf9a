import pytest

from esflab import primes


@pytest.fixture(scope="session")
def table():
    """The full schedule table; built once, shared read-only."""
    return primes.build_schedule_table(primes.DEFAULT_SIEVE_LIMIT)
