import pytest

from rvcutoff import generators as gen
from rvcutoff.model import protocol_to_net


@pytest.fixture
def fig1():
    return gen.fig1()


@pytest.fixture
def single_rule():
    return gen.single_rule()


@pytest.fixture
def p2():
    return gen.p2()


@pytest.fixture
def single_rule_net(single_rule):
    return protocol_to_net(single_rule)
