"""
估计流水线 - 自由阶段、所需的推动阶段与估计的组合
"""
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..dynamics.relax import relax
from ..dynamics.step import Masks, Nudge
from ..errors import ConfigError, ModeError
from ..network.architecture import ArchitectureConfig
from ..network.params import GradientEstimate, Parameters
from ..network.state import NetworkState
from .ep import draw_sign, estimate_one_sided, estimate_symmetric
from .vector_field import estimate_kp_vf_sym, estimate_vf_sym

logger = logging.getLogger(__name__)


class EstimatorKind(Enum):
    """梯度估计方式"""

    ONE_SIDED = "one_sided"
    RANDOM_SIGN = "random_sign"
    SYMMETRIC = "symmetric"
    VF_SYM = "vf_sym"
    KP_VF_SYM = "kp_vf_sym"

    @property
    def needs_unidirectional(self) -> bool:
        return self in (EstimatorKind.VF_SYM, EstimatorKind.KP_VF_SYM)

    @property
    def three_phase(self) -> bool:
        return self not in (EstimatorKind.ONE_SIDED, EstimatorKind.RANDOM_SIGN)

    @classmethod
    def parse(cls, value: "str | EstimatorKind") -> "EstimatorKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            choices = ", ".join(kind.value for kind in cls)
            raise ConfigError(f"未知的估计方式: {value}，可选 {choices}", field="estimator") from None


def check_compatible(kind: EstimatorKind, config: ArchitectureConfig) -> None:
    """估计方式与连接模式必须匹配"""
    if kind.needs_unidirectional and not config.unidirectional:
        raise ModeError(f"{kind.value} 需要单向连接（unidirectional）")
    if not kind.needs_unidirectional and config.unidirectional:
        raise ModeError(f"{kind.value} 需要双向连接（bidirectional），单向模式请用 vf_sym 或 kp_vf_sym")


@dataclass
class PhaseReport:
    """一次迭代中各阶段的残差与随机符号"""

    free_residual: float
    pos_residual: float
    neg_residual: float = float("nan")
    sign: int = 1


@dataclass
class EstimateResult:
    estimate: GradientEstimate
    report: PhaseReport
    free_state: NetworkState


def compute_estimate(
    kind: EstimatorKind,
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    T: int,
    K: int,
    beta: float,
    rng: np.random.Generator | None = None,
    masks: Masks | None = None,
) -> EstimateResult:
    """
    一次训练迭代的梯度估计

    自由阶段从 s₀ = 0 出发执行 T 步；各推动阶段都从同一个 s* 出发执行 K 步。
    掩码在所有阶段共用。

    Args:
        kind: 估计方式
        rng: RANDOM_SIGN 抽取符号所需
    """
    kind = EstimatorKind.parse(kind)
    check_compatible(kind, config)
    if beta == 0:
        raise ConfigError("β 不能为 0", field="beta")

    start = NetworkState.zeros(config, x.shape[0])
    free, _ = relax(x, start, params, config, T, masks=masks)
    s_free = free.final_state

    sign = 1
    if kind is EstimatorKind.RANDOM_SIGN:
        if rng is None:
            raise ConfigError("random_sign 需要随机数生成器", field="seed")
        sign = draw_sign(rng)
    signed = sign * abs(beta) if kind is EstimatorKind.RANDOM_SIGN else beta

    pos, _ = relax(x, s_free, params, config, K, Nudge(signed, y), masks=masks)
    report = PhaseReport(free.residual, pos.residual, sign=sign)

    if kind in (EstimatorKind.ONE_SIDED, EstimatorKind.RANDOM_SIGN):
        estimate = estimate_one_sided(x, y, s_free, pos.final_state, signed, params, config, masks)
    else:
        neg, _ = relax(x, s_free, params, config, K, Nudge(-beta, y), masks=masks)
        report.neg_residual = neg.residual
        if kind is EstimatorKind.SYMMETRIC:
            estimate = estimate_symmetric(
                x, y, pos.final_state, neg.final_state, beta, params, config, masks
            )
        elif kind is EstimatorKind.VF_SYM:
            estimate = estimate_vf_sym(
                x, y, s_free, pos.final_state, neg.final_state, beta, params, config, masks
            )
        else:
            estimate = estimate_kp_vf_sym(
                x, y, pos.final_state, neg.final_state, beta, params, config, masks
            )

    logger.debug(
        f"{kind.value} 估计完成: 自由残差 {report.free_residual:.2e}, "
        f"正向残差 {report.pos_residual:.2e}, 反向残差 {report.neg_residual:.2e}, 符号 {sign:+d}"
    )
    return EstimateResult(estimate, report, s_free)
