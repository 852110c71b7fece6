"""
自检 - 在小网络上核对算子伴随、学习规则与两个梯度基准
"""
import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .dynamics.relax import relax
from .dynamics.step import Nudge, step
from .estimators.ep import estimate_one_sided, estimate_symmetric
from .network.architecture import ArchitectureConfig, ConnectionMode, ConvLayerSpec, LossHead
from .network.params import Parameters, bias_name, init_params, weight_name
from .network.primitive import phi
from .network.readout import one_hot
from .network.state import NetworkState
from .oracles.bptt import bptt_gradient
from .oracles.compare import relative_error
from .oracles.finite_diff import finite_diff_loss_grad, numerical_gradient
from .tensor.ops import conv2d, conv2d_transpose, conv2d_weight_grad, gdot, maxpool, unpool

logger = logging.getLogger(__name__)


# ---- 小网络 ----

def toy_architecture(
    loss: LossHead = LossHead.SOFTMAX_READOUT,
    connection: ConnectionMode = ConnectionMode.BIDIRECTIONAL,
) -> ArchitectureConfig:
    """1×8×8 输入，一个 2 通道卷积层（池化后 4×4）加全连接层，3 类"""
    fc = (3,) if loss is LossHead.SQUARED_ERROR else (5,)
    return ArchitectureConfig((1, 8, 8), (ConvLayerSpec(2, 3, 1, 2),), fc, 3, loss=loss, connection=connection)


def linear_regime_params(config: ArchitectureConfig, seed: int = 0, scale: float = 0.25) -> Parameters:
    """
    偏置取 1、权重缩小 scale 倍，使各单元的输入停留在 σ 的线性段内
    """
    params = init_params(config, seed)
    for name, value in params.items():
        if name.startswith("b"):
            value[...] = 1.0
        else:
            value *= scale
    return params


def toy_batch(config: ArchitectureConfig, batch: int = 2, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    x = rng.random((batch, *config.input_shape))
    labels = rng.integers(0, config.num_classes, size=batch)
    return x, one_hot(labels, config.num_classes)


# ---- 单项检查 ----

@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float


def _check_conv_adjoint(rng: np.random.Generator) -> float:
    w = rng.standard_normal((2, 3, 3, 3))
    x = rng.standard_normal((3, 5, 5))
    y = rng.standard_normal((2, 5, 5))
    lhs = gdot(y, conv2d(w, x, None, 1))
    rhs = gdot(conv2d_transpose(w, y, 1), x)
    return abs(lhs - rhs) / max(abs(lhs), 1.0)


def _check_weight_grad(rng: np.random.Generator) -> float:
    w = rng.standard_normal((2, 3, 3, 3))
    x = rng.standard_normal((3, 5, 5))
    upstream = rng.standard_normal((2, 5, 5))
    analytic, _ = conv2d_weight_grad(upstream, x, 1, 3)
    numeric = numerical_gradient(lambda: gdot(upstream, conv2d(w, x, None, 1)), w)
    return float(np.linalg.norm(analytic - numeric) / np.linalg.norm(numeric))


def _check_pool_roundtrip(rng: np.random.Generator) -> float:
    x = rng.standard_normal((1, 3, 8, 8))
    _, ind = maxpool(x, 2)
    y = rng.random((1, 3, 4, 4))
    values, _ = maxpool(unpool(y, ind), 2)
    return float(np.max(np.abs(values - y)))


def _check_phi_step_link(rng: np.random.Generator) -> float:
    config = toy_architecture(LossHead.SQUARED_ERROR)
    params = linear_regime_params(config, seed=1)
    x, _ = toy_batch(config, 1, seed=2)
    state = NetworkState([rng.random((1, *config.layer_shape(n))) for n in range(1, config.num_layers + 1)])
    worst = 0.0
    after = step(x, state, params, config)
    for n, layer in enumerate(state.layers, start=1):
        grad = numerical_gradient(lambda: float(phi(x, state, params, config).sum()), layer)
        expected = config.act(grad)
        worst = max(worst, float(np.max(np.abs(after.layer(n) - expected))))
    return worst


def _check_symmetric_identity(rng: np.random.Generator) -> float:
    config = toy_architecture()
    params = linear_regime_params(config, seed=3)
    x, y = toy_batch(config, 2, seed=4)
    free, _ = relax(x, NetworkState.zeros(config, 2), params, config, 40)
    beta = 0.3
    pos, _ = relax(x, free.final_state, params, config, 10, Nudge(beta, y))
    neg, _ = relax(x, free.final_state, params, config, 10, Nudge(-beta, y))
    plus = estimate_one_sided(x, y, free.final_state, pos.final_state, beta, params, config)
    minus = estimate_one_sided(x, y, free.final_state, neg.final_state, -beta, params, config)
    sym = estimate_symmetric(x, y, pos.final_state, neg.final_state, beta, params, config)
    return relative_error((plus + minus).scale(0.5), sym)


def _check_bptt_oracle(rng: np.random.Generator) -> float:
    config = toy_architecture()
    params = linear_regime_params(config, seed=5)
    x, y = toy_batch(config, 2, seed=6)
    T = 15
    names = [weight_name(1), bias_name(2)]
    oracle = bptt_gradient(x, y, params, config, T).gradient
    numeric = finite_diff_loss_grad(x, y, params, config, T, names=names, tol=np.inf)
    return relative_error(oracle, numeric, names)


CHECKS: list[tuple[str, Callable[[np.random.Generator], float], float]] = [
    ("conv2d 伴随", _check_conv_adjoint, 1e-10),
    ("卷积核梯度 vs 有限差分", _check_weight_grad, 1e-6),
    ("maxpool∘unpool", _check_pool_roundtrip, 0.0),
    ("Φ 与单步更新", _check_phi_step_link, 1e-6),
    ("对称 = 两个单边的平均", _check_symmetric_identity, 1e-10),
    ("BPTT vs 有限差分", _check_bptt_oracle, 1e-4),
]


def run_selftest(seed: int = 0) -> list[CheckResult]:
    """逐项执行，返回每项的偏差与容差"""
    rng = np.random.default_rng(seed)
    results = []
    for name, check, tolerance in CHECKS:
        value = check(rng)
        passed = bool(value <= tolerance)
        results.append(CheckResult(name, passed, value, tolerance))
        if passed:
            logger.info(f"自检通过: {name} ({value:.2e} ≤ {tolerance:.0e})")
        else:
            logger.warning(f"自检失败: {name} ({value:.2e} > {tolerance:.0e})")
    return results
