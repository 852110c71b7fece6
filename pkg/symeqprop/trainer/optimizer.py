"""
优化器 - 带动量与权重衰减的 SGD（上升约定）、余弦退火与 Kolen-Pollack 更新
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ModeError, NonFiniteError
from ..estimators.pipeline import EstimatorKind
from ..network.architecture import ArchitectureConfig
from ..network.params import (
    GradientEstimate,
    Parameters,
    backward_name,
    bias_name,
    group_of,
    layer_of,
    weight_name,
)
from .hyperparams import Hyperparams


@dataclass
class OptimizerState:
    """动量缓冲（与参数同构）、当前轮次与各组学习率"""

    buffers: GradientEstimate
    epoch: int = 0
    learning_rates: list[float] = field(default_factory=list)

    @classmethod
    def create(cls, params: Parameters, hp: Hyperparams) -> "OptimizerState":
        return cls(GradientEstimate.zeros_like(params), 0, list(hp.learning_rates))


def cosine_lr(initial: float, final: float, epoch: int, decay_epochs: int) -> float:
    """final + ½(initial − final)(1 + cos(π·min(epoch, D)/D))"""
    if decay_epochs <= 0:
        raise ConfigError(f"余弦衰减轮数必须为正: {decay_epochs}", field="cosine_decay_epochs")
    if epoch < 0:
        raise ConfigError(f"轮次不能为负: {epoch}", field="epoch")
    progress = min(epoch, decay_epochs) / decay_epochs
    return final + 0.5 * (initial - final) * (1 + math.cos(math.pi * progress))


def scheduled_rates(hp: Hyperparams, epoch: int) -> list[float]:
    return [
        cosine_lr(lr, hp.final_learning_rate, epoch, hp.cosine_decay_epochs)
        for lr in hp.learning_rates
    ]


def _decay_for(name: str, hp: Hyperparams) -> float:
    if not hp.bias_weight_decay and name == bias_name(layer_of(name)):
        return 0.0
    return hp.weight_decay


def sgd_step(
    params: Parameters,
    estimate: GradientEstimate,
    opt: OptimizerState,
    hp: Hyperparams,
    config: ArchitectureConfig,
) -> tuple[Parameters, OptimizerState]:
    """
    原地更新：v ← μv + (Δ − λθ)，θ ← θ + η·v

    η 按参数所在组取自 opt.learning_rates。
    """
    params.assert_congruent(estimate)
    estimate.check_finite("梯度估计")
    for name, value in params.items():
        rate = opt.learning_rates[group_of(name, config)]
        buffer = opt.buffers[name]
        buffer *= hp.momentum
        buffer += estimate[name] - _decay_for(name, hp) * value
        value += rate * buffer
    if not all(np.all(np.isfinite(value)) for _, value in params.items()):
        raise NonFiniteError("参数更新后出现 NaN 或 Inf")
    return params, opt


def is_shared(estimate: GradientEstimate, config: ArchitectureConfig) -> bool:
    """每个内部层的 wᶠ 与 wᵇ 是否收到同一个估计"""
    return all(
        np.array_equal(estimate[weight_name(n)], estimate[backward_name(n)])
        for n in range(2, config.num_layers + 1)
    )


def kp_step(
    params: Parameters,
    estimate: GradientEstimate,
    opt: OptimizerState,
    hp: Hyperparams,
    config: ArchitectureConfig,
) -> tuple[Parameters, OptimizerState]:
    """
    Kolen-Pollack 更新：Δθᶠ = η(∇̂ − λθᶠ)，Δθᵇ = η(∇̂ − λθᵇ)

    ∇̂ 对前向与反向权重共用，权重衰减各自作用；无动量时二者之差按 (1 − ηλ) 几何衰减。
    """
    if hp.estimator is not EstimatorKind.KP_VF_SYM:
        raise ModeError(f"kp_step 需要 kp_vf_sym 估计，当前为 {hp.estimator.value}")
    if not config.unidirectional:
        raise ModeError("kp_step 需要单向连接")
    if not is_shared(estimate, config):
        raise ModeError("kp_step 要求前向与反向权重共用同一估计")
    return sgd_step(params, estimate, opt, hp, config)


def weight_gap(params: Parameters, config: ArchitectureConfig) -> float:
    """‖θᶠ − θᵇ‖，遍历所有内部层"""
    total = 0.0
    for n in range(2, config.num_layers + 1):
        total += float(np.sum((params[weight_name(n)] - params[backward_name(n)]) ** 2))
    return math.sqrt(total)
