"""
有限差分基准 - 稳态损失 L* = ℓ(s*, y) 的中心差分梯度

每次扰动都从 s₀ = 0 重新松弛，度量的是稳态损失本身的梯度。
"""
import logging
from collections.abc import Callable

import numpy as np

from ..dynamics.relax import relax
from ..errors import ConvergenceError
from ..network.architecture import ArchitectureConfig
from ..network.params import GradientEstimate, Parameters
from ..network.readout import loss
from ..network.state import NetworkState

logger = logging.getLogger(__name__)


def numerical_gradient(f: Callable[[], float], array: np.ndarray, eps: float = 1e-5) -> np.ndarray:
    """
    f 对 array 各元素的中心差分，array 被原地扰动后复原
    """
    grad = np.zeros_like(array, dtype=np.float64)
    it = np.nditer(array, flags=["multi_index"])
    for _ in it:
        index = it.multi_index
        original = array[index]
        array[index] = original + eps
        plus = f()
        array[index] = original - eps
        minus = f()
        array[index] = original
        grad[index] = (plus - minus) / (2 * eps)
    return grad


def steady_state_loss(
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    T: int,
) -> tuple[float, float]:
    """(批平均稳态损失, 末步残差)"""
    start = NetworkState.zeros(config, x.shape[0])
    report, _ = relax(x, start, params, config, T)
    return float(np.mean(loss(report.final_state, y, params, config))), report.residual


def finite_diff_loss_grad(
    x: np.ndarray,
    y: np.ndarray,
    params: Parameters,
    config: ArchitectureConfig,
    T: int,
    eps: float = 1e-5,
    names: list[str] | None = None,
    tol: float = 1e-6,
) -> GradientEstimate:
    """
    −∂L*/∂θ 的基准（返回下降约定的 ∂L*/∂θ）

    Args:
        names: 只计算这些参数，其余记为 0；默认全部
        tol: 允许的最大松弛残差

    Raises:
        ConvergenceError: 任一次松弛未达到 tol
    """
    work = params.copy()
    base, res = steady_state_loss(x, y, work, config, T)
    if res > tol:
        raise ConvergenceError(f"自由阶段未收敛: 残差 {res:.3e} > {tol:.1e}", residual=res)

    worst = res

    def objective() -> float:
        nonlocal worst
        value, r = steady_state_loss(x, y, work, config, T)
        worst = max(worst, r)
        return value

    grad = GradientEstimate.zeros_like(params)
    for name in names if names is not None else params.keys():
        grad[name] = numerical_gradient(objective, work[name], eps)
    if worst > tol:
        raise ConvergenceError(f"扰动后的松弛未收敛: 残差 {worst:.3e} > {tol:.1e}", residual=worst)
    logger.debug(f"有限差分完成: L*={base:.6e}, 最大残差 {worst:.2e}")
    return grad
