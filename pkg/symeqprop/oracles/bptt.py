"""
BPTT 基准 - 沿记录下的自由阶段轨迹反向累积 ∂L/∂θ

池化索引在每一步视为常数，网络在每一步内是分段线性的。
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..dynamics.relax import Trajectory, relax
from ..dynamics.step import pre_activations
from ..errors import ConfigError, ModeError
from ..network.architecture import ArchitectureConfig
from ..network.params import (
    READOUT,
    GradientEstimate,
    Parameters,
    backward_name,
    bias_name,
    weight_name,
)
from ..network.readout import loss_grad_readout, loss_grad_state
from ..network.state import NetworkState
from ..tensor.ops import (
    PoolIndices,
    conv2d,
    conv2d_transpose,
    conv2d_weight_grad,
    flatten,
    maxpool,
    unpool,
    unpool_transpose,
)

logger = logging.getLogger(__name__)


@dataclass
class BPTTResult:
    """
    gradient: ℓ(s_T) 对全部参数的梯度（下降约定，含 w_out 的直接项）
    partial_sums[t]: 只回传最后 t 步得到的截断梯度，t = 0..T，不含 w_out
    per_step[k]: 第 T−1−k 步转移的贡献，partial_sums[k+1] − partial_sums[k]
    """

    gradient: GradientEstimate
    partial_sums: list[GradientEstimate] = field(default_factory=list)
    per_step: list[GradientEstimate] = field(default_factory=list)

    def truncated(self, t: int) -> GradientEstimate:
        if not 0 <= t < len(self.partial_sums):
            raise ConfigError(f"截断步数 {t} 超出 [0, {len(self.partial_sums) - 1}]", field="t")
        return self.partial_sums[t]


def _feedback_indices(
    n: int,
    s_n: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    forward_indices: list[PoolIndices | None],
) -> PoolIndices | None:
    """第 n+1 层传回第 n 层时使用的池化索引，与 pre_activations 保持一致"""
    if not config.is_conv(n + 1):
        return None
    if not config.unidirectional:
        return forward_indices[n]
    spec = config.conv_spec(n + 1)
    _, ind = maxpool(conv2d(params[backward_name(n + 1)], s_n, None, spec.padding), spec.pool)
    return ind


def _reverse_step(
    x: np.ndarray,
    state: NetworkState,
    indices: list[PoolIndices | None],
    lam_next: list[np.ndarray],
    params: Parameters,
    config: ArchitectureConfig,
) -> tuple[list[np.ndarray], GradientEstimate]:
    """由 ∂L/∂s_{t+1} 得到 ∂L/∂s_t 以及本步对参数的贡献"""
    act = config.act
    drives, _ = pre_activations(x, state, params, config)
    s = state.with_input(x)
    deltas = [act.deriv(a) * lam for a, lam in zip(drives, lam_next)]
    lam = [np.zeros_like(layer) for layer in state.layers]
    grads = GradientEstimate.zeros_like(params)

    for n in range(1, config.num_layers + 1):
        delta = deltas[n - 1]
        weight = params[weight_name(n)]
        if config.is_conv(n):
            spec = config.conv_spec(n)
            up = unpool(delta, indices[n - 1])
            dw, db = conv2d_weight_grad(up, s[n - 1], spec.padding, spec.kernel)
            if n > 1:
                lam[n - 2] += conv2d_transpose(weight, up, spec.padding)
        else:
            rows = flatten(s[n - 1]) if s[n - 1].ndim > 2 else s[n - 1]
            dw, db = delta.T @ rows, delta.sum(axis=0)
            if n > 1:
                lam[n - 2] += (delta @ weight).reshape(s[n - 1].shape)
        grads[weight_name(n)] += dw
        grads[bias_name(n)] += db

    for n in range(1, config.num_layers):
        delta = deltas[n - 1]
        name = backward_name(n + 1) if config.unidirectional else weight_name(n + 1)
        back = params[name]
        if config.is_conv(n + 1):
            spec = config.conv_spec(n + 1)
            ind = _feedback_indices(n, s[n], params, config, indices)
            lam[n] += unpool_transpose(conv2d(back, delta, None, spec.padding), ind)
            dv, _ = conv2d_weight_grad(unpool(s[n + 1], ind), delta, spec.padding, spec.kernel)
        else:
            flat = flatten(delta) if delta.ndim > 2 else delta
            lam[n] += flat @ back.T
            dv = s[n + 1].T @ flat
        grads[name] += dv
    return lam, grads


def bptt(
    trajectory: Trajectory | None,
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
) -> BPTTResult:
    """
    沿自由阶段轨迹 s₀..s_T 反向传播，损失为批平均的 ℓ(s_T, y)
    """
    if trajectory is None or len(trajectory.states) < 2:
        raise ConfigError("BPTT 需要记录下的自由阶段轨迹", field="trajectory")
    if trajectory.beta != 0:
        raise ModeError(f"BPTT 只作用于自由阶段轨迹，当前为 {trajectory.phase}")
    if len(trajectory.indices) < trajectory.steps:
        raise ConfigError("轨迹缺少池化索引", field="trajectory")

    final = trajectory.states[-1]
    batch = final.batch_size
    lam = [np.zeros_like(layer) for layer in final.layers]
    lam[-1] = loss_grad_state(final, y, params, config) / batch

    running = GradientEstimate.zeros_like(params)
    partial_sums = [running.copy()]
    per_step = []
    for t in range(trajectory.steps - 1, -1, -1):
        lam, grads = _reverse_step(
            x, trajectory.states[t], trajectory.indices[t], lam, params, config
        )
        per_step.append(grads)
        running = running + grads
        partial_sums.append(running)

    gradient = running.copy()
    if config.has_readout:
        gradient[READOUT] = loss_grad_readout(final, y, params, config)
    logger.debug(f"BPTT 完成: {trajectory.steps} 步")
    return BPTTResult(gradient, partial_sums, per_step)


def bptt_gradient(
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    T: int,
    trajectory: Trajectory | None = None,
) -> BPTTResult:
    """从 s₀ = 0 记录 T 步自由阶段（或使用给定轨迹）并执行 BPTT"""
    if trajectory is None:
        start = NetworkState.zeros(config, x.shape[0])
        _, trajectory = relax(x, start, params, config, T, record=True)
    return bptt(trajectory, x, y, params, config)
