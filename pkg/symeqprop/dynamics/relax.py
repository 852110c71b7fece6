"""
松弛 - 反复执行 step 直到固定步数，可记录完整轨迹
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NonFiniteError, ShapeError
from ..network.architecture import ArchitectureConfig
from ..network.params import Parameters
from ..network.state import NetworkState
from ..tensor.ops import PoolIndices
from .step import Masks, Nudge, pre_activations, step_with_indices

logger = logging.getLogger(__name__)


@dataclass
class Trajectory:
    """s₀..s_T 以及每一步使用的池化索引（indices[t] 取自 sₜ）"""

    states: list[NetworkState] = field(default_factory=list)
    indices: list[list[PoolIndices | None]] = field(default_factory=list)
    beta: float = 0.0

    @property
    def phase(self) -> str:
        return "free" if self.beta == 0 else f"nudged({self.beta:g})"

    @property
    def steps(self) -> int:
        return len(self.states) - 1

    def __len__(self) -> int:
        return len(self.states)


@dataclass
class RelaxReport:
    final_state: NetworkState
    residual: float
    steps: int


def residual(state_a: NetworkState, state_b: NetworkState) -> float:
    """各层逐元素最大绝对差的最大值"""
    if len(state_a.layers) != len(state_b.layers):
        raise ShapeError(f"层数不一致: {len(state_a.layers)} 与 {len(state_b.layers)}")
    worst = 0.0
    for a, b in zip(state_a.layers, state_b.layers):
        if a.shape != b.shape:
            raise ShapeError(f"状态形状不一致: {a.shape} 与 {b.shape}")
        if a.size:
            worst = max(worst, float(np.max(np.abs(a - b))))
    return worst


def _check_finite(state: NetworkState, step_index: int) -> None:
    for n, layer in enumerate(state.layers, start=1):
        if not np.all(np.isfinite(layer)):
            raise NonFiniteError(f"第 {step_index} 步第 {n} 层出现 NaN 或 Inf", step=step_index, layer=n)


def relax(
    x: np.ndarray,
    state0: NetworkState,
    params: Parameters,
    config: ArchitectureConfig,
    steps: int,
    nudge: Nudge | None = None,
    record: bool = False,
    masks: Masks | None = None,
    tol: float | None = None,
) -> tuple[RelaxReport, Trajectory | None]:
    """
    从 state0 出发执行 steps 步

    Args:
        nudge: None 或 β = 0 为自由阶段
        record: 是否保存每一步的状态与池化索引
        tol: 残差低于该值时提前停止，默认关闭

    Returns:
        (报告, 轨迹或 None)
    """
    if steps < 1:
        raise ConfigError(f"松弛步数必须 ≥ 1: {steps}", field="steps")
    state0.check_shapes(config)
    trajectory = Trajectory([state0], [], nudge.beta if nudge else 0.0) if record else None

    state = state0
    res = 0.0
    taken = 0
    for t in range(steps):
        new_state, indices = step_with_indices(x, state, params, config, nudge, masks)
        _check_finite(new_state, t + 1)
        res = residual(new_state, state)
        if trajectory is not None:
            trajectory.indices.append(indices)
            trajectory.states.append(new_state)
        state = new_state
        taken = t + 1
        if tol is not None and res < tol:
            break

    if trajectory is not None:
        _, last_indices = pre_activations(x, state.masked(masks), params, config)
        trajectory.indices.append(last_indices)
    logger.debug(f"松弛结束: {taken} 步, 残差 {res:.3e}, β={nudge.beta if nudge else 0.0:g}")
    return RelaxReport(state, res, taken), trajectory
