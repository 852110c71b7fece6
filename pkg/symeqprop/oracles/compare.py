"""
比较工具 - 把 EP 上升估计换算到损失梯度的单位，并计算偏差
"""
import numpy as np

from ..network.architecture import ArchitectureConfig
from ..network.params import READOUT, GradientEstimate, TensorBundle, layer_of


def descent_view(estimate: TensorBundle, config: ArchitectureConfig) -> GradientEstimate:
    """
    EP 估计 → ∂L*/∂θ 的近似

    σ 的有效斜率为 c 时，稳态是 ½‖s‖² − cΦ + βℓ 的驻点，
    因此循环参数乘以 −c，w_out 只取负号。
    """
    slope = config.act.slope
    return GradientEstimate(
        {
            name: -value if name == READOUT else -slope * value
            for name, value in estimate.items()
        }
    )


def layer_names(names: list[str], layer: int) -> list[str]:
    """属于第 layer 层的参数名（w_out 为第 0 层）"""
    return [name for name in names if layer_of(name) == layer]


def relative_error(
    estimate: TensorBundle, reference: TensorBundle, names: list[str] | None = None
) -> float:
    """‖estimate − reference‖ / ‖reference‖；参考为 0 时返回绝对误差"""
    names = reference.keys() if names is None else names
    diff = np.linalg.norm(estimate.flat(names) - reference.flat(names))
    scale = np.linalg.norm(reference.flat(names))
    return float(diff / scale) if scale > 0 else float(diff)


def max_abs_deviation(
    estimate: TensorBundle, reference: TensorBundle, names: list[str] | None = None
) -> float:
    names = reference.keys() if names is None else names
    diff = np.abs(estimate.flat(names) - reference.flat(names))
    return float(diff.max()) if diff.size else 0.0


def cosine_similarity(
    a: TensorBundle, b: TensorBundle, names: list[str] | None = None
) -> float:
    """展平后的余弦相似度；任一方为零向量时返回 nan"""
    names = b.keys() if names is None else names
    va, vb = a.flat(names), b.flat(names)
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0 or nb == 0:
        return float("nan")
    return float(np.dot(va, vb) / (na * nb))
