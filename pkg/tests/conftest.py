import numpy as np
import pytest

from mgtdispatch import DemandProfile, build_graph, cooldown_example, flat_tariff


@pytest.fixture
def tiny_model():
    return cooldown_example()


@pytest.fixture
def tiny_graph(tiny_model):
    # 5 layers price 4 steps
    return build_graph(tiny_model, 5)


@pytest.fixture
def tiny_tariff():
    # selling forbidden, power 0.5 and heat 0.1 per kW-step
    return flat_tariff(4, 15.0, 0.5, None, 0.1)


@pytest.fixture
def tiny_demand():
    return DemandProfile(np.full(4, 14.0), np.full(4, 20.0))
