"""
公共夹具 - 小网络、线性段参数与固定种子的批
"""
import numpy as np
import pytest

from symeqprop.network.architecture import ConnectionMode, LossHead
from symeqprop.network.params import backward_name, weight_name
from symeqprop.selftest import linear_regime_params, toy_architecture, toy_batch
from symeqprop.tensor.precision import set_precision


@pytest.fixture(autouse=True)
def f64():
    set_precision("f64")
    yield
    set_precision("f64")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def ce_config():
    return toy_architecture(LossHead.SOFTMAX_READOUT)


@pytest.fixture
def se_config():
    return toy_architecture(LossHead.SQUARED_ERROR)


@pytest.fixture
def uni_config():
    return toy_architecture(LossHead.SOFTMAX_READOUT, ConnectionMode.UNIDIRECTIONAL)


@pytest.fixture
def ce_params(ce_config):
    return linear_regime_params(ce_config, seed=7)


@pytest.fixture
def se_params(se_config):
    return linear_regime_params(se_config, seed=7)


@pytest.fixture
def uni_se_config():
    return toy_architecture(LossHead.SQUARED_ERROR, ConnectionMode.UNIDIRECTIONAL)


def tie_backward(params, config):
    """wᵇ := wᶠ"""
    for n in range(2, config.num_layers + 1):
        params[backward_name(n)] = params[weight_name(n)].copy()
    return params


@pytest.fixture
def tied_uni_params(uni_config):
    return tie_backward(linear_regime_params(uni_config, seed=7), uni_config)


@pytest.fixture
def tied_uni_se_params(uni_se_config):
    return tie_backward(linear_regime_params(uni_se_config, seed=7), uni_se_config)


@pytest.fixture
def ce_batch(ce_config):
    return toy_batch(ce_config, batch=3, seed=11)


@pytest.fixture
def se_batch(se_config):
    return toy_batch(se_config, batch=3, seed=11)
