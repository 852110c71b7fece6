"""
单向模式的估计 - 对称向量场（VF）与 Kolen-Pollack 向量场（KP-VF）
"""
import numpy as np

from ..dynamics.step import Masks
from ..network.architecture import ArchitectureConfig
from ..network.params import READOUT, GradientEstimate, Parameters, backward_name, weight_name
from ..network.state import NetworkState
from .ep import _require_beta, readout_ascent
from .learning_rules import vf_half


def _symmetric_readout(estimate, x, y, s_beta, s_minus_beta, params, config, masks) -> None:
    if config.has_readout:
        estimate[READOUT] = 0.5 * (
            readout_ascent(s_beta, y, params, config, masks)
            + readout_ascent(s_minus_beta, y, params, config, masks)
        )


def estimate_vf_sym(
    x: np.ndarray,
    y: np.ndarray,
    s_free: NetworkState,
    s_beta: NetworkState,
    s_minus_beta: NetworkState,
    beta: float,
    params: Parameters,
    config: ArchitectureConfig,
    masks: Masks | None = None,
) -> GradientEstimate:
    """
    对称 VF：前向权重用推动态之差乘自由态的突触前活动，
    反向权重用自由态的突触后活动乘推动态之差；一般 Δwᶠ ≠ Δwᵇ。
    """
    _require_beta(beta)
    scale = 0.5 / beta
    forward = (
        vf_half(x, s_beta, params, config, "forward", s_free, masks)
        - vf_half(x, s_minus_beta, params, config, "forward", s_free, masks)
    ).scale(scale)
    backward = (
        vf_half(x, s_beta, params, config, "backward", s_free, masks)
        - vf_half(x, s_minus_beta, params, config, "backward", s_free, masks)
    ).scale(scale)
    estimate = forward
    for n in range(2, config.num_layers + 1):
        estimate[backward_name(n)] = backward[backward_name(n)]
    _symmetric_readout(estimate, x, y, s_beta, s_minus_beta, params, config, masks)
    return estimate


def estimate_kp_vf_sym(
    x: np.ndarray,
    y: np.ndarray,
    s_beta: NetworkState,
    s_minus_beta: NetworkState,
    beta: float,
    params: Parameters,
    config: ArchitectureConfig,
    masks: Masks | None = None,
) -> GradientEstimate:
    """
    KP-VF：∇̄ᶠ 与 ∇̄ᵇ 各自在两个推动端点处取值（池化索引分别来自 wᶠ⋆s 与 wᵇ⋆s），
    二者的平均同时赋给 wᶠₙ 与 wᵇₙ；w₁、偏置与 w_out 同对称 VF。
    """
    _require_beta(beta)
    scale = 0.5 / beta
    grad_f = (
        vf_half(x, s_beta, params, config, "forward", masks=masks)
        - vf_half(x, s_minus_beta, params, config, "forward", masks=masks)
    ).scale(scale)
    grad_b = (
        vf_half(x, s_beta, params, config, "backward", masks=masks)
        - vf_half(x, s_minus_beta, params, config, "backward", masks=masks)
    ).scale(scale)
    estimate = grad_f
    for n in range(2, config.num_layers + 1):
        shared = 0.5 * (grad_f[weight_name(n)] + grad_b[backward_name(n)])
        estimate[weight_name(n)] = shared
        estimate[backward_name(n)] = shared.copy()
    _symmetric_readout(estimate, x, y, s_beta, s_minus_beta, params, config, masks)
    return estimate
