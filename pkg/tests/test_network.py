"""
网络结构、参数、Φ / Φ̃ 与读出的测试
"""
import numpy as np
import numpy.testing as npt
import pytest

from symeqprop.dynamics.step import pre_activations, step
from symeqprop.errors import ConfigError, ModeError, ShapeError
from symeqprop.network.architecture import (
    ArchitectureConfig,
    ConnectionMode,
    ConvLayerSpec,
    LossHead,
    cifar10_config,
)
from symeqprop.network.params import (
    READOUT,
    Parameters,
    backward_name,
    bias_name,
    group_of,
    init_params,
    layer_of,
    param_shapes,
    recurrent_names,
    weight_name,
)
from symeqprop.network.primitive import phi, phi_tilde
from symeqprop.network.readout import loss, loss_grad_state, one_hot, predict, readout, softmax
from symeqprop.network.state import NetworkState
from symeqprop.oracles.finite_diff import numerical_gradient
from symeqprop.selftest import linear_regime_params, toy_architecture


def random_state(config, batch, rng):
    return NetworkState(
        [rng.random((batch, *config.layer_shape(n))) for n in range(1, config.num_layers + 1)]
    )


def scalar_config():
    return ArchitectureConfig((1, 1, 1), (), (1,), 1, loss=LossHead.SQUARED_ERROR)


class TestArchitecture:
    def test_toy_shapes(self, ce_config):
        assert ce_config.num_layers == 2
        assert ce_config.layer_shape(1) == (2, 4, 4)
        assert ce_config.layer_shape(2) == (5,)
        assert ce_config.weight_shape(1) == (2, 1, 3, 3)
        assert ce_config.weight_shape(2) == (5, 32)

    def test_cifar_shapes(self):
        config = cifar10_config()
        assert [config.layer_shape(n) for n in range(1, 5)] == [
            (128, 16, 16),
            (256, 8, 8),
            (512, 4, 4),
            (512, 1, 1),
        ]
        assert config.num_groups == 5

    def test_squared_error_groups(self):
        assert cifar10_config(LossHead.SQUARED_ERROR).num_groups == 5
        assert toy_architecture(LossHead.SQUARED_ERROR).num_groups == 2

    def test_not_divisible_by_pool(self):
        with pytest.raises(ConfigError) as exc:
            ArchitectureConfig((1, 7, 7), (ConvLayerSpec(2, 3, 1, 2),), (), 3)
        assert exc.value.field == "conv_pools"

    def test_squared_error_size_mismatch(self):
        with pytest.raises(ConfigError) as exc:
            ArchitectureConfig((1, 8, 8), (ConvLayerSpec(2),), (4,), 3, loss=LossHead.SQUARED_ERROR)
        assert exc.value.field == "num_classes"

    def test_unknown_loss(self):
        with pytest.raises(ConfigError) as exc:
            ArchitectureConfig((1, 8, 8), (ConvLayerSpec(2),), (), 3, loss="hinge")
        assert exc.value.field == "loss"

    def test_empty_network(self):
        with pytest.raises(ConfigError):
            ArchitectureConfig((1, 8, 8))

    def test_dict_roundtrip(self, uni_config):
        assert ArchitectureConfig.from_dict(uni_config.to_dict()) == uni_config

    def test_from_dict_column_mismatch(self):
        values = {"input_shape": [1, 8, 8], "conv_channels": [2, 4], "conv_kernels": [3]}
        with pytest.raises(ConfigError) as exc:
            ArchitectureConfig.from_dict(values)
        assert exc.value.field == "conv_kernels"


class TestParameters:
    def test_names(self, ce_config, uni_config):
        assert list(param_shapes(ce_config)) == ["w1", "b1", "w2", "b2", READOUT]
        assert backward_name(2) in param_shapes(uni_config)
        assert READOUT not in recurrent_names(ce_config)

    def test_groups(self, uni_config):
        assert group_of(weight_name(1), uni_config) == 0
        assert group_of(backward_name(2), uni_config) == 1
        assert group_of(READOUT, uni_config) == 2
        assert layer_of(READOUT) == 0

    def test_deterministic(self, ce_config):
        a = init_params(ce_config, 3)
        b = init_params(ce_config, 3)
        for name in a:
            assert a[name].tobytes() == b[name].tobytes()

    def test_seed_changes_values(self, ce_config):
        assert not np.array_equal(init_params(ce_config, 3)["w1"], init_params(ce_config, 4)["w1"])

    def test_within_bound(self):
        config = ArchitectureConfig((3, 32, 32), (ConvLayerSpec(64, 5, 2, 2),), (), 10)
        params = init_params(config, 0)
        bound = 1.0 / np.sqrt(3 * 5 * 5)
        assert np.abs(params["w1"]).max() <= bound
        assert np.abs(params["b1"]).max() <= bound

    def test_mean_near_zero(self):
        config = ArchitectureConfig((3, 32, 32), (ConvLayerSpec(64, 5, 2, 2),), (), 10)
        w = init_params(config, 0)["w1"]
        bound = 1.0 / np.sqrt(75)
        sigma = bound / np.sqrt(3) / np.sqrt(w.size)
        assert abs(w.mean()) <= 3 * sigma

    def test_bundle_arithmetic(self, ce_params):
        doubled = ce_params + ce_params
        npt.assert_allclose(doubled["w1"], 2 * ce_params["w1"])
        assert (doubled - ce_params).norm() == pytest.approx(ce_params.norm())
        assert ce_params.flat().size == sum(v.size for _, v in ce_params.items())

    def test_incongruent(self, ce_params, se_params):
        with pytest.raises(ShapeError):
            ce_params + se_params


class TestState:
    def test_zeros(self, ce_config):
        state = NetworkState.zeros(ce_config, 4)
        assert state.batch_size == 4
        assert state.top.shape == (4, 5)
        state.check_shapes(ce_config)

    def test_bad_shapes(self, ce_config, se_config):
        with pytest.raises(ShapeError):
            NetworkState.zeros(se_config, 2).check_shapes(ce_config)

    def test_masked(self, ce_config):
        state = NetworkState([np.ones((1, 2, 4, 4)), np.ones((1, 5))])
        masked = state.masked({2: np.full((1, 5), 2.0)})
        npt.assert_array_equal(masked.top, np.full((1, 5), 2.0))
        assert masked.layers[0] is state.layers[0]


class TestPhi:
    def test_zero_state(self, ce_config, ce_params, ce_batch):
        x, _ = ce_batch
        npt.assert_array_equal(phi(x, NetworkState.zeros(ce_config, 3), ce_params, ce_config), np.zeros(3))

    def test_scalar_fc(self):
        config = scalar_config()
        params = Parameters({"w1": np.array([[1.5]]), "b1": np.array([0.0])})
        x = np.array([[[[2.0]]]])
        state = NetworkState([np.array([[0.4]])])
        assert phi(x, state, params, config)[0] == pytest.approx(0.4 * 1.5 * 2.0)
        drive = pre_activations(x, state, params, config)[0][0]
        npt.assert_allclose(drive, [[3.0]])

    @pytest.mark.parametrize("head", [LossHead.SQUARED_ERROR, LossHead.SOFTMAX_READOUT])
    def test_gradient_is_pre_activation(self, rng, head):
        config = toy_architecture(head)
        params = linear_regime_params(config, seed=2)
        x = rng.random((1, *config.input_shape))
        state = random_state(config, 1, rng)
        drives, _ = pre_activations(x, state, params, config)
        for n, layer in enumerate(state.layers, start=1):
            numeric = numerical_gradient(lambda: float(phi(x, state, params, config).sum()), layer)
            npt.assert_allclose(drives[n - 1], numeric, atol=1e-6)

    def test_unidirectional(self, uni_config, tied_uni_params, ce_batch):
        x, _ = ce_batch
        with pytest.raises(ModeError):
            phi(x, NetworkState.zeros(uni_config, 3), tied_uni_params, uni_config)


class TestPhiTilde:
    def test_top_without_nudge(self, rng, uni_config, tied_uni_params):
        x = rng.random((2, *uni_config.input_shape))
        state = random_state(uni_config, 2, rng)
        top = uni_config.num_layers
        w = tied_uni_params[weight_name(top)]
        b = tied_uni_params[bias_name(top)]
        s_prev = state.layer(top - 1).reshape(2, -1)
        expected = np.sum(state.top * (s_prev @ w.T + b), axis=1)
        npt.assert_allclose(phi_tilde(top, tied_uni_params, state, x, None, 0.0, uni_config), expected)

    def test_nudge_adds_loss(self, rng, uni_config, tied_uni_params):
        x = rng.random((2, *uni_config.input_shape))
        y = one_hot(np.array([0, 2]), 3)
        state = random_state(uni_config, 2, rng)
        top = uni_config.num_layers
        free = phi_tilde(top, tied_uni_params, state, x, y, 0.0, uni_config)
        nudged = phi_tilde(top, tied_uni_params, state, x, y, 0.5, uni_config)
        npt.assert_allclose(free - nudged, 0.5 * loss(state, y, tied_uni_params, uni_config))

    def test_gradient_is_pre_activation(self, rng, uni_config):
        params = linear_regime_params(uni_config, seed=5)
        x = rng.random((1, *uni_config.input_shape))
        state = random_state(uni_config, 1, rng)
        drives, _ = pre_activations(x, state, params, uni_config)
        for n in range(1, uni_config.num_layers + 1):
            layer = state.layer(n)
            numeric = numerical_gradient(
                lambda: float(phi_tilde(n, params, state, x, None, 0.0, uni_config).sum()), layer
            )
            npt.assert_allclose(drives[n - 1], numeric, atol=1e-6)

    def test_tied_weights_match_bidirectional(self, rng, ce_config, uni_config, tied_uni_params):
        shared = Parameters({name: tied_uni_params[name] for name in param_shapes(ce_config)})
        x = rng.random((2, *ce_config.input_shape))
        a = NetworkState.zeros(ce_config, 2)
        b = NetworkState.zeros(uni_config, 2)
        for _ in range(10):
            a = step(x, a, shared, ce_config)
            b = step(x, b, tied_uni_params, uni_config)
            for la, lb in zip(a.layers, b.layers):
                npt.assert_allclose(la, lb, atol=1e-12)

    def test_layer_out_of_range(self, uni_config, tied_uni_params, ce_batch):
        x, _ = ce_batch
        state = NetworkState.zeros(uni_config, 3)
        with pytest.raises(ShapeError):
            phi_tilde(0, tied_uni_params, state, x, None, 0.0, uni_config)
        with pytest.raises(ShapeError):
            phi_tilde(3, tied_uni_params, state, x, None, 0.0, uni_config)

    def test_bidirectional(self, ce_config, ce_params, ce_batch):
        x, _ = ce_batch
        with pytest.raises(ModeError):
            phi_tilde(1, ce_params, NetworkState.zeros(ce_config, 3), x, None, 0.0, ce_config)


class TestReadout:
    def test_zero_weights_uniform(self, rng):
        probs = readout(rng.random((4, 6)), np.zeros((3, 6)))
        npt.assert_allclose(probs, np.full((4, 3), 1 / 3))

    def test_sums_to_one(self, rng):
        probs = readout(rng.standard_normal((5, 2, 2, 2)), rng.standard_normal((4, 8)) * 10)
        npt.assert_allclose(probs.sum(axis=1), np.ones(5), atol=1e-12)

    def test_shift_invariance(self, rng):
        logits = rng.standard_normal((3, 4))
        npt.assert_allclose(softmax(logits + 100.0), softmax(logits), atol=1e-15)

    def test_single_example(self, rng):
        assert readout(rng.random(6), rng.random((3, 6))).shape == (3,)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeError):
            readout(rng.random((2, 6)), rng.random((3, 5)))

    def test_squared_error_loss(self, se_config, se_params):
        state = NetworkState([np.zeros((1, 2, 4, 4)), np.array([[1.0, 0.0, 0.0]])])
        y = one_hot(np.array([2]), 3)
        npt.assert_allclose(loss(state, y, se_params, se_config), [1.0])
        npt.assert_allclose(loss_grad_state(state, y, se_params, se_config), [[1.0, 0.0, -1.0]])
        npt.assert_array_equal(predict(state, se_params, se_config), [0])

    def test_cross_entropy_gradient(self, rng, ce_config, ce_params):
        state = random_state(ce_config, 2, rng)
        y = one_hot(np.array([1, 0]), 3)
        numeric = numerical_gradient(lambda: float(loss(state, y, ce_params, ce_config).sum()), state.layers[1])
        npt.assert_allclose(loss_grad_state(state, y, ce_params, ce_config), numeric, atol=1e-8)

    def test_target_shape(self, ce_config, ce_params):
        with pytest.raises(ShapeError):
            loss(NetworkState.zeros(ce_config, 2), np.zeros((2, 4)), ce_params, ce_config)


def test_connection_enum_from_string():
    config = ArchitectureConfig((1, 8, 8), (ConvLayerSpec(2),), (), 3, connection="unidirectional")
    assert config.connection is ConnectionMode.UNIDIRECTIONAL
