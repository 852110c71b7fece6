"""
EP 梯度估计 - 单边、随机符号、对称三阶段

全部采用上升约定：θ ← θ + η·estimate。
"""
import numpy as np

from ..dynamics.relax import relax
from ..dynamics.step import Masks, Nudge
from ..errors import ConfigError
from ..network.architecture import ArchitectureConfig
from ..network.params import READOUT, GradientEstimate, Parameters
from ..network.readout import loss_grad_readout
from ..network.state import NetworkState
from .learning_rules import dphi_dtheta


def _require_beta(beta: float) -> None:
    if beta == 0:
        raise ConfigError("β 不能为 0", field="beta")


def readout_ascent(
    state: NetworkState,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    masks: Masks | None = None,
) -> np.ndarray:
    """w_out 的更新 −(ŷ − y)·s^Lᵀ，取自给定阶段的端点"""
    return -loss_grad_readout(state.masked(masks), y, params, config)


def estimate_one_sided(
    x: np.ndarray,
    y: np.ndarray,
    s_free: NetworkState,
    s_beta: NetworkState,
    beta: float,
    params: Parameters,
    config: ArchitectureConfig,
    masks: Masks | None = None,
) -> GradientEstimate:
    """(∂Φ/∂θ(s^β) − ∂Φ/∂θ(s*)) / β"""
    _require_beta(beta)
    estimate = (
        dphi_dtheta(x, s_beta, params, config, masks) - dphi_dtheta(x, s_free, params, config, masks)
    ).scale(1.0 / beta)
    if config.has_readout:
        estimate[READOUT] = readout_ascent(s_beta, y, params, config, masks)
    return estimate


def estimate_symmetric(
    x: np.ndarray,
    y: np.ndarray,
    s_beta: NetworkState,
    s_minus_beta: NetworkState,
    beta: float,
    params: Parameters,
    config: ArchitectureConfig,
    masks: Masks | None = None,
) -> GradientEstimate:
    """(∂Φ/∂θ(s^β) − ∂Φ/∂θ(s^−β)) / 2β；两个推动阶段须从同一个 s* 出发"""
    _require_beta(beta)
    estimate = (
        dphi_dtheta(x, s_beta, params, config, masks)
        - dphi_dtheta(x, s_minus_beta, params, config, masks)
    ).scale(0.5 / beta)
    if config.has_readout:
        estimate[READOUT] = 0.5 * (
            readout_ascent(s_beta, y, params, config, masks)
            + readout_ascent(s_minus_beta, y, params, config, masks)
        )
    return estimate


def draw_sign(rng: np.random.Generator) -> int:
    """以 1/2 的概率返回 +1 或 −1"""
    return 1 if rng.random() < 0.5 else -1


def estimate_random_sign(
    x: np.ndarray,
    y: np.ndarray,
    s_free: NetworkState,
    beta: float,
    params: Parameters,
    config: ArchitectureConfig,
    steps: int,
    rng: np.random.Generator,
    masks: Masks | None = None,
) -> GradientEstimate:
    """随机抽取 β 的符号，从 s* 推动 steps 步后做单边估计"""
    _require_beta(beta)
    signed = draw_sign(rng) * abs(beta)
    report, _ = relax(x, s_free, params, config, steps, Nudge(signed, y), masks=masks)
    return estimate_one_sided(x, y, s_free, report.final_state, signed, params, config, masks)
