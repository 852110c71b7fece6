"""
截断梯度曲线 - 推动阶段第 t 步的 EP 估计与只回传最后 t 步的 BPTT 梯度逐层对比
"""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..dynamics.relax import relax
from ..dynamics.step import Nudge
from ..errors import ConfigError, ModeError
from ..estimators.learning_rules import dphi_dtheta
from ..network.architecture import ArchitectureConfig
from ..network.params import GradientEstimate, Parameters, layer_of, recurrent_names
from ..network.state import NetworkState
from .bptt import bptt
from .compare import cosine_similarity, descent_view, layer_names, relative_error

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["t", "layer", "estimator", "value_norm", "cosine_vs_bptt"]
ESTIMATORS = ("one_sided", "symmetric")


@dataclass
class TruncatedCurve:
    """
    t = 0..K 的三条序列，均已换算到 ∂L/∂θ 的单位

    names 为参与比较的循环参数；t = 0 时三者都为 0。
    """

    beta: float
    names: list[str]
    one_sided: list[GradientEstimate] = field(default_factory=list)
    symmetric: list[GradientEstimate] = field(default_factory=list)
    bptt: list[GradientEstimate] = field(default_factory=list)

    @property
    def K(self) -> int:
        return len(self.bptt) - 1

    @property
    def layers(self) -> list[int]:
        return sorted({layer_of(name) for name in self.names})

    def series(self, estimator: str) -> list[GradientEstimate]:
        if estimator not in (*ESTIMATORS, "bptt"):
            raise ConfigError(f"未知的曲线: {estimator}", field="estimator")
        return getattr(self, estimator)

    def cosine(self, estimator: str, t: int, layer: int) -> float:
        names = layer_names(self.names, layer)
        return cosine_similarity(self.series(estimator)[t], self.bptt[t], names)

    def error(self, estimator: str, t: int, layer: int) -> float:
        names = layer_names(self.names, layer)
        return relative_error(self.series(estimator)[t], self.bptt[t], names)

    def terminal_cosines(self, estimator: str) -> dict[int, float]:
        return {layer: self.cosine(estimator, self.K, layer) for layer in self.layers}

    def terminal_errors(self, estimator: str) -> dict[int, float]:
        return {layer: self.error(estimator, self.K, layer) for layer in self.layers}

    def rows(self) -> list[dict]:
        """每个 t、每层、每条曲线一行"""
        out = []
        for t in range(self.K + 1):
            for layer in self.layers:
                names = layer_names(self.names, layer)
                for estimator in (*ESTIMATORS, "bptt"):
                    value = self.series(estimator)[t]
                    out.append(
                        {
                            "t": t,
                            "layer": layer,
                            "estimator": estimator,
                            "value_norm": value.norm(names),
                            "cosine_vs_bptt": cosine_similarity(value, self.bptt[t], names),
                        }
                    )
        return out


def gdu_curves(
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    T: int,
    K: int,
    beta: float,
) -> TruncatedCurve:
    """
    生成截断曲线

    自由阶段从 0 出发记录 T 步，BPTT 沿这段轨迹回传；两个推动阶段从 s_T 出发记录 K 步。
    """
    if config.unidirectional:
        raise ModeError("截断曲线只用于双向模式")
    if beta == 0:
        raise ConfigError("β 不能为 0", field="beta")
    if K > T:
        raise ConfigError(f"K={K} 不能超过自由阶段步数 T={T}", field="K")

    start = NetworkState.zeros(config, x.shape[0])
    _, free = relax(x, start, params, config, T, record=True)
    oracle = bptt(free, x, y, params, config)
    s_free = free.states[-1]
    _, pos = relax(x, s_free, params, config, K, Nudge(beta, y), record=True)
    _, neg = relax(x, s_free, params, config, K, Nudge(-beta, y), record=True)

    names = recurrent_names(config)
    base = dphi_dtheta(x, s_free, params, config)
    curve = TruncatedCurve(beta, names)
    for t in range(K + 1):
        at_pos = dphi_dtheta(x, pos.states[t], params, config)
        at_neg = dphi_dtheta(x, neg.states[t], params, config)
        curve.one_sided.append(descent_view((at_pos - base).scale(1.0 / beta), config))
        curve.symmetric.append(descent_view((at_pos - at_neg).scale(0.5 / beta), config))
        curve.bptt.append(oracle.truncated(t))

    logger.info(
        f"截断曲线完成: K={K}, β={beta:g}, 末端余弦 {curve.terminal_cosines('symmetric')}"
    )
    return curve


def write_curve_csv(curve: TruncatedCurve, path: str | Path) -> Path:
    """按 t, layer, estimator, value_norm, cosine_vs_bptt 写出曲线表"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CURVE_COLUMNS)
        writer.writeheader()
        for row in curve.rows():
            writer.writerow(row)
    logger.info(f"截断曲线已写入 {path}")
    return path
