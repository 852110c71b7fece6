"""
单步动力学 - 所有层同步更新（读 sₜ，写 sₜ₊₁）
"""
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ..network.architecture import ArchitectureConfig
from ..network.params import Parameters
from ..network.primitive import feedback_drive, feedback_weight, forward_drive
from ..network.readout import loss_grad_state
from ..network.state import NetworkState
from ..tensor.ops import PoolIndices

Masks = Mapping[int, np.ndarray]


@dataclass(frozen=True)
class Nudge:
    """第二/三阶段的推动：强度 β 与目标 y"""

    beta: float
    target: np.ndarray


def pre_activations(
    x: np.ndarray,
    state: NetworkState,
    params: Parameters,
    config: ArchitectureConfig,
) -> tuple[list[np.ndarray], list[PoolIndices | None]]:
    """
    各层 σ 之前的输入，以及前向卷积的池化索引

    双向模式下等于 ∂Φ/∂sⁿ；单向模式反向项使用 wᵇ 及其自身的池化索引。
    """
    s = state.with_input(x)
    drives = []
    indices = []
    for n in range(1, config.num_layers + 1):
        drive, ind = forward_drive(n, s[n - 1], params, config)
        drives.append(drive)
        indices.append(ind)
    for n in range(1, config.num_layers):
        reuse = None if config.unidirectional else indices[n]
        drives[n - 1] = drives[n - 1] + feedback_drive(
            n, s[n], s[n + 1], feedback_weight(n, params, config), config, reuse
        )
    return drives, indices


def step_with_indices(
    x: np.ndarray,
    state: NetworkState,
    params: Parameters,
    config: ArchitectureConfig,
    nudge: Nudge | None = None,
    masks: Masks | None = None,
) -> tuple[NetworkState, list[PoolIndices | None]]:
    """一步更新，同时返回本步使用的前向池化索引"""
    effective = state.masked(masks)
    drives, indices = pre_activations(x, effective, params, config)
    act = config.act
    masks = masks or {}
    layers = []
    for n, drive in enumerate(drives, start=1):
        if n in masks:
            drive = masks[n] * drive
        layers.append(act(drive))

    if nudge is not None and nudge.beta != 0:
        push = -nudge.beta * loss_grad_state(effective, nudge.target, params, config)
        top = config.num_layers
        if top in masks:
            push = masks[top] * push
        layers[-1] = layers[-1] + push
    return NetworkState(layers), indices


def step(
    x: np.ndarray,
    state: NetworkState,
    params: Parameters,
    config: ArchitectureConfig,
    nudge: Nudge | None = None,
    masks: Masks | None = None,
) -> NetworkState:
    """sₜ₊₁ = σ(∂Φ/∂s(sₜ)) + 推动项"""
    return step_with_indices(x, state, params, config, nudge, masks)[0]
