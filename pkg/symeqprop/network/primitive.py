"""
原函数 Φ 与逐层量 Φ̃ⁿ

双向模式下动力学为 s ← σ(∂Φ/∂s)：
    Φ = Σ_conv sⁿ • P(wₙ ⋆ sⁿ⁻¹ + bₙ) + Σ_fc sⁿ·(wₙ·F(sⁿ⁻¹) + bₙ)
单向模式不存在 Φ，第 n 层的更新来自 Φ̃ⁿ 对 sⁿ 的导数。
"""
import numpy as np

from ..errors import ModeError, ShapeError
from ..tensor.ops import (
    PoolIndices,
    batch_gdot,
    conv2d,
    conv2d_transpose,
    flatten,
    maxpool,
    unpool,
)
from .architecture import ArchitectureConfig
from .params import Parameters, backward_name, bias_name, weight_name
from .readout import loss
from .state import NetworkState


def _rows(s: np.ndarray) -> np.ndarray:
    return flatten(s) if s.ndim > 2 else s


def layer_drive(
    n: int,
    s_prev: np.ndarray,
    weight: np.ndarray,
    bias: np.ndarray | None,
    config: ArchitectureConfig,
) -> tuple[np.ndarray, PoolIndices | None]:
    """第 n 层的自下而上项：P(W ⋆ sⁿ⁻¹ + B) 或 W·F(sⁿ⁻¹) + B"""
    if config.is_conv(n):
        spec = config.conv_spec(n)
        return maxpool(conv2d(weight, s_prev, bias, spec.padding), spec.pool)
    out = _rows(s_prev) @ weight.T
    if bias is not None:
        out = out + bias
    return out, None


def forward_drive(
    n: int, s_prev: np.ndarray, params: Parameters, config: ArchitectureConfig
) -> tuple[np.ndarray, PoolIndices | None]:
    return layer_drive(n, s_prev, params[weight_name(n)], params[bias_name(n)], config)


def feedback_drive(
    n: int,
    s_n: np.ndarray,
    s_next: np.ndarray,
    weight: np.ndarray,
    config: ArchitectureConfig,
    ind: PoolIndices | None = None,
) -> np.ndarray:
    """
    第 n+1 层经 weight 传回第 n 层的项，即 ∂/∂sⁿ [sⁿ⁺¹ • P(weight ⋆ sⁿ)]

    卷积时池化索引取自 weight ⋆ sⁿ；ind 给定时直接复用。
    """
    if config.is_conv(n + 1):
        spec = config.conv_spec(n + 1)
        if ind is None:
            _, ind = maxpool(conv2d(weight, s_n, None, spec.padding), spec.pool)
        return conv2d_transpose(weight, unpool(s_next, ind), spec.padding)
    return (s_next @ weight).reshape(s_n.shape)


def feedback_weight(n: int, params: Parameters, config: ArchitectureConfig) -> np.ndarray:
    """第 n+1 层传回第 n 层时使用的权重"""
    if config.unidirectional:
        return params[backward_name(n + 1)]
    return params[weight_name(n + 1)]


def phi(
    x: np.ndarray, state: NetworkState, params: Parameters, config: ArchitectureConfig
) -> np.ndarray:
    """逐样本的 Φ，返回 (N,)"""
    if config.unidirectional:
        raise ModeError("单向模式没有原函数 Φ，请使用 phi_tilde")
    s = state.with_input(x)
    total = np.zeros(state.batch_size, dtype=np.result_type(x, state.top))
    for n in range(1, config.num_layers + 1):
        drive, _ = forward_drive(n, s[n - 1], params, config)
        total = total + batch_gdot(s[n], drive)
    return total


def phi_tilde(
    n: int,
    params: Parameters,
    state: NetworkState,
    x: np.ndarray,
    y: np.ndarray | None,
    beta: float,
    config: ArchitectureConfig,
) -> np.ndarray:
    """
    逐样本的 Φ̃ⁿ = sⁿ•P(wᶠₙ⋆sⁿ⁻¹) + sⁿ⁺¹•P(wᵇₙ₊₁⋆sⁿ)

    顶层没有反向项，改为 −β·ℓ，其对 s^L 的导数即推动项。
    """
    if not config.unidirectional:
        raise ModeError("phi_tilde 仅用于单向模式")
    if not 1 <= n <= config.num_layers:
        raise ShapeError(f"层号 {n} 超出范围 [1, {config.num_layers}]")
    s = state.with_input(x)
    drive, _ = forward_drive(n, s[n - 1], params, config)
    value = batch_gdot(s[n], drive)
    if n < config.num_layers:
        back, _ = layer_drive(n + 1, s[n], params[backward_name(n + 1)], None, config)
        value = value + batch_gdot(s[n + 1], back)
    elif beta != 0:
        value = value - beta * loss(state, y, params, config)
    return value
