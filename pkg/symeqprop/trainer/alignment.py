"""
前向与反向权重的对齐角
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ModeError, NonFiniteError, ShapeError
from ..estimators.pipeline import EstimatorKind, compute_estimate
from ..network.architecture import ArchitectureConfig
from ..network.params import Parameters, backward_name, weight_name
from .hyperparams import Hyperparams
from .optimizer import OptimizerState, kp_step, scheduled_rates, weight_gap

logger = logging.getLogger(__name__)


def alignment_angle(wf: np.ndarray, wb: np.ndarray) -> float:
    """α = (180/π)·acos(wᵇ•wᶠ / (‖wᵇ‖‖wᶠ‖))，取值 [0, 180]"""
    if wf.shape != wb.shape:
        raise ShapeError(f"对齐角要求形状一致: {wf.shape} 与 {wb.shape}")
    nf = np.linalg.norm(wf.ravel())
    nb = np.linalg.norm(wb.ravel())
    if nf == 0 or nb == 0:
        raise NonFiniteError("零范数权重没有对齐角")
    cos = float(np.dot(wf.ravel(), wb.ravel()) / (nf * nb))
    return float(np.degrees(np.arccos(np.clip(cos, -1.0, 1.0))))


def layer_angles(params: Parameters, config: ArchitectureConfig) -> dict[int, float]:
    """各内部层的对齐角；双向模式返回空字典"""
    if not config.unidirectional:
        return {}
    return {
        n: alignment_angle(params[weight_name(n)], params[backward_name(n)])
        for n in range(2, config.num_layers + 1)
    }


@dataclass
class AlignmentTrace:
    angles: list[dict[int, float]] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)

    def layer(self, n: int) -> list[float]:
        return [step[n] for step in self.angles]

    def rows(self) -> list[dict]:
        out = []
        for i, (angles, gap) in enumerate(zip(self.angles, self.gaps)):
            row = {"iteration": i, "weight_gap": gap}
            row.update({f"angle_layer_{n}": value for n, value in angles.items()})
            out.append(row)
        return out


def alignment_trace(
    params: Parameters,
    config: ArchitectureConfig,
    hp: Hyperparams,
    batches,
    iterations: int,
    rng: np.random.Generator | None = None,
) -> AlignmentTrace:
    """
    连续执行 KP-VF 迭代并记录每步之后的对齐角与 ‖θᶠ − θᵇ‖

    Args:
        batches: 反复产出 (x, y) 的可迭代对象
        iterations: 迭代次数，第 0 项为初始值
    """
    if hp.estimator is not EstimatorKind.KP_VF_SYM:
        raise ModeError(f"对齐轨迹需要 kp_vf_sym 估计，当前为 {hp.estimator.value}")
    opt = OptimizerState.create(params, hp)
    opt.learning_rates = scheduled_rates(hp, 0)
    trace = AlignmentTrace([layer_angles(params, config)], [weight_gap(params, config)])
    source = iter(batches)
    for i in range(iterations):
        x, y = next(source)
        result = compute_estimate(hp.estimator, x, y, params, config, hp.T, hp.K, hp.beta, rng)
        kp_step(params, result.estimate, opt, hp, config)
        trace.angles.append(layer_angles(params, config))
        trace.gaps.append(weight_gap(params, config))
        logger.debug(f"第 {i + 1} 次 KP 迭代: 对齐角 {trace.angles[-1]}")
    return trace
