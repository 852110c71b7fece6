"""
逐层学习规则 - ∂Φ/∂θ 与单向模式的 ∂Φ̃ⁿ/∂θ
"""
from typing import Literal

import numpy as np

from ..dynamics.step import Masks
from ..errors import ModeError
from ..network.architecture import ArchitectureConfig
from ..network.params import (
    GradientEstimate,
    Parameters,
    backward_name,
    bias_name,
    weight_name,
)
from ..network.state import NetworkState
from ..tensor.ops import PoolIndices, conv2d, conv2d_weight_grad, flatten, maxpool, unpool

VFHalf = Literal["forward", "backward"]


def weight_term_grad(
    n: int,
    post: np.ndarray,
    pre: np.ndarray,
    weight: np.ndarray,
    config: ArchitectureConfig,
    bias: np.ndarray | None = None,
    ind: PoolIndices | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    ∂/∂W [post • P(W ⋆ pre + B)] 与 ∂/∂B，对批求和

    卷积层的池化索引取自 W ⋆ pre + B 在给定状态下的前向计算。
    """
    if config.is_conv(n):
        spec = config.conv_spec(n)
        if ind is None:
            _, ind = maxpool(conv2d(weight, pre, bias, spec.padding), spec.pool)
        return conv2d_weight_grad(unpool(post, ind), pre, spec.padding, spec.kernel)
    rows = flatten(pre) if pre.ndim > 2 else pre
    return post.T @ rows, post.sum(axis=0)


def _complete(tensors: dict, params: Parameters) -> GradientEstimate:
    """按参数顺序补齐未涉及的张量（记为 0）"""
    return GradientEstimate(
        {name: tensors[name] if name in tensors else np.zeros_like(value) for name, value in params.items()}
    )


def dphi_dtheta(
    x: np.ndarray,
    state: NetworkState,
    params: Parameters,
    config: ArchitectureConfig,
    masks: Masks | None = None,
) -> GradientEstimate:
    """∂Φ/∂θ 在给定状态处的值，对批取平均；w_out 不出现在 Φ 中，记为 0"""
    if config.unidirectional:
        raise ModeError("dphi_dtheta 仅用于双向模式，单向模式请用 vf_half")
    s = state.masked(masks).with_input(x)
    batch = state.batch_size
    tensors = {}
    for n in range(1, config.num_layers + 1):
        dw, db = weight_term_grad(
            n, s[n], s[n - 1], params[weight_name(n)], config, params[bias_name(n)]
        )
        tensors[weight_name(n)] = dw / batch
        tensors[bias_name(n)] = db / batch
    return _complete(tensors, params)


def vf_half(
    x: np.ndarray,
    phase_state: NetworkState,
    params: Parameters,
    config: ArchitectureConfig,
    which: VFHalf,
    free_state: NetworkState | None = None,
    masks: Masks | None = None,
) -> GradientEstimate:
    """
    ∂Φ̃ⁿ/∂wⁱ 在某一阶段端点处的值（对批取平均）

    free_state 为 None 时前后两侧都取 phase_state；否则层自身的活动取自
    phase_state，相邻层取自 free_state：
      forward  — post = sⁿ(phase)，pre = sⁿ⁻¹(free)，对 wᶠₙ 与 bₙ
      backward — post = sⁿ(free)，pre = sⁿ⁻¹(phase)，对 wᵇₙ（n ≥ 2）
    未涉及的参数记为 0。
    """
    if not config.unidirectional:
        raise ModeError("vf_half 仅用于单向模式")
    phase = phase_state.masked(masks).with_input(x)
    free = free_state.masked(masks).with_input(x) if free_state is not None else phase
    batch = phase_state.batch_size
    tensors = {}
    if which == "forward":
        for n in range(1, config.num_layers + 1):
            dw, db = weight_term_grad(
                n, phase[n], free[n - 1], params[weight_name(n)], config, params[bias_name(n)]
            )
            tensors[weight_name(n)] = dw / batch
            tensors[bias_name(n)] = db / batch
    elif which == "backward":
        for n in range(2, config.num_layers + 1):
            dw, _ = weight_term_grad(n, free[n], phase[n - 1], params[backward_name(n)], config)
            tensors[backward_name(n)] = dw / batch
    else:
        raise ModeError(f"未知的半边: {which}，应为 forward 或 backward")
    return _complete(tensors, params)
