import pytest

from pvlab.numtheory import sieve


@pytest.fixture(scope="session")
def table():
    return sieve(10**6)


@pytest.fixture(scope="session")
def small_table():
    return sieve(20_000)
