"""
偏差阶数检验 - 对称估计与 −∂L*/∂θ 的偏差随 β 按二阶缩小，单边估计按一阶
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from ..dynamics.relax import relax
from ..dynamics.step import Nudge
from ..errors import ConfigError, ModeError
from ..estimators.ep import estimate_one_sided, estimate_symmetric
from ..network.architecture import ArchitectureConfig
from ..network.params import GradientEstimate, Parameters, layer_of
from ..network.state import NetworkState
from .compare import descent_view, layer_names, max_abs_deviation, relative_error
from .finite_diff import finite_diff_loss_grad

logger = logging.getLogger(__name__)


@dataclass
class DeviationReport:
    """某个 β 下估计相对基准的偏差"""

    beta: float
    relative: float
    max_abs: float
    per_layer: dict[int, float] = field(default_factory=dict)


@dataclass
class SweepReport:
    betas: list[float]
    one_sided: list[float]
    symmetric: list[float]

    @staticmethod
    def _ratios(errors: list[float]) -> list[float]:
        return [b / a if a > 0 else float("nan") for a, b in zip(errors, errors[1:])]

    @staticmethod
    def _slope(betas: list[float], errors: list[float]) -> float:
        """log-log 最小二乘斜率"""
        if len(betas) < 2 or min(errors) <= 0:
            return float("nan")
        return float(np.polyfit(np.log(np.abs(betas)), np.log(errors), 1)[0])

    @property
    def one_sided_ratios(self) -> list[float]:
        return self._ratios(self.one_sided)

    @property
    def symmetric_ratios(self) -> list[float]:
        return self._ratios(self.symmetric)

    @property
    def one_sided_slope(self) -> float:
        return self._slope(self.betas, self.one_sided)

    @property
    def symmetric_slope(self) -> float:
        return self._slope(self.betas, self.symmetric)

    def rows(self) -> list[dict]:
        ratios_1 = [float("nan"), *self.one_sided_ratios]
        ratios_2 = [float("nan"), *self.symmetric_ratios]
        return [
            {
                "beta": beta,
                "err_one_sided": e1,
                "ratio_one_sided": r1,
                "err_symmetric": e2,
                "ratio_symmetric": r2,
            }
            for beta, e1, r1, e2, r2 in zip(self.betas, self.one_sided, ratios_1, self.symmetric, ratios_2)
        ]


def _require_bidirectional(config: ArchitectureConfig) -> None:
    if config.unidirectional:
        raise ModeError("偏差阶数检验只用于双向模式")


def _deviation(
    beta: float, estimate: GradientEstimate, oracle: GradientEstimate, config: ArchitectureConfig
) -> DeviationReport:
    view = descent_view(estimate, config)
    names = oracle.keys()
    per_layer = {
        layer: relative_error(view, oracle, layer_names(names, layer))
        for layer in sorted({layer_of(name) for name in names})
    }
    return DeviationReport(
        beta,
        relative_error(view, oracle, names),
        max_abs_deviation(view, oracle, names),
        per_layer,
    )


def _phase_endpoints(x, y, params, config, beta, T, K):
    start = NetworkState.zeros(config, x.shape[0])
    free, _ = relax(x, start, params, config, T)
    s_free = free.final_state
    pos, _ = relax(x, s_free, params, config, K, Nudge(beta, y))
    neg, _ = relax(x, s_free, params, config, K, Nudge(-beta, y))
    return s_free, pos.final_state, neg.final_state


def theorem1_check(
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    beta: float,
    T: int,
    K: int,
    eps: float = 1e-5,
    oracle: GradientEstimate | None = None,
) -> DeviationReport:
    """
    对称估计 [∂Φ/∂θ(s^β) − ∂Φ/∂θ(s^−β)]/2β 与有限差分 ∂L*/∂θ 的偏差

    oracle 可复用以避免重复计算有限差分。
    """
    _require_bidirectional(config)
    if beta == 0:
        raise ConfigError("β 不能为 0", field="beta")
    if oracle is None:
        oracle = finite_diff_loss_grad(x, y, params, config, T, eps)
    _, s_pos, s_neg = _phase_endpoints(x, y, params, config, beta, T, K)
    estimate = estimate_symmetric(x, y, s_pos, s_neg, beta, params, config)
    report = _deviation(beta, estimate, oracle, config)
    logger.info(f"β={beta:g}: 相对偏差 {report.relative:.3e}, 最大绝对偏差 {report.max_abs:.3e}")
    return report


def lemma_sweep(
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    betas: list[float],
    T: int,
    K: int,
    eps: float = 1e-5,
    oracle: GradientEstimate | None = None,
) -> SweepReport:
    """在一组 β 上比较单边与对称估计的偏差"""
    _require_bidirectional(config)
    if not betas or any(beta == 0 for beta in betas):
        raise ConfigError("β 列表不能为空且不能含 0", field="grad_check_betas")
    if oracle is None:
        oracle = finite_diff_loss_grad(x, y, params, config, T, eps)

    one_sided, symmetric = [], []
    for beta in betas:
        s_free, s_pos, s_neg = _phase_endpoints(x, y, params, config, beta, T, K)
        est_1 = estimate_one_sided(x, y, s_free, s_pos, beta, params, config)
        est_2 = estimate_symmetric(x, y, s_pos, s_neg, beta, params, config)
        one_sided.append(_deviation(beta, est_1, oracle, config).relative)
        symmetric.append(_deviation(beta, est_2, oracle, config).relative)
        logger.info(f"β={beta:g}: 单边偏差 {one_sided[-1]:.3e}, 对称偏差 {symmetric[-1]:.3e}")
    return SweepReport(list(betas), one_sided, symmetric)
