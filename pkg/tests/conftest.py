import pytest
from hypothesis import HealthCheck, settings

from maidkit import card_game, principal_agent

import helpers

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def card1():
    return card_game(1)


@pytest.fixture
def pa():
    return principal_agent()


@pytest.fixture
def cascade():
    return helpers.cascade_maid()


@pytest.fixture
def pennies():
    return helpers.matching_pennies()


@pytest.fixture
def sig_min():
    return helpers.minimal_signaling()
