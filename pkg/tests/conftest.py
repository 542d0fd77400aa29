import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption("--seed", action="store", type=int, default=20260809,
                     help="seed for the randomized suites")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)
