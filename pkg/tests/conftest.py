import pytest
from pytest import fixture

from cellmix.spectral.fields import random_bandlimited
from cellmix.twopoint.operators import trig_tables
from cellmix.twopoint.state import random_two_point
from cellmix.verify.exponents import PUBLISHED_ASSIGNMENT


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long acceptance runs, need --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@fixture(scope="session")
def random_fields():
    return [random_bandlimited(32, 4, seed) for seed in range(5)]


@fixture(scope="session")
def two_point_sample():
    return random_two_point(12, seed=7)


@fixture(scope="session")
def small_two_point_samples():
    return [random_two_point(8, seed=3, index=i) for i in range(5)]


@fixture(scope="session")
def tables():
    return trig_tables(12)


@fixture(scope="session")
def published_assignment():
    return PUBLISHED_ASSIGNMENT
