"""
激活函数 - 硬 sigmoid 及其缩放版本
"""
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class Activation:
    """σ(x) = clip(slope·x, 0, 1)，活跃区间为 (0, 1/slope)"""

    name: str
    slope: float

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x * self.slope, 0.0, 1.0)

    def deriv(self, x: np.ndarray) -> np.ndarray:
        """几乎处处导数；拐点 0 与 1/slope 处取 0"""
        upper = 1.0 / self.slope
        active = (x > 0.0) & (x < upper)
        return np.where(active, self.slope, 0.0).astype(np.result_type(x, np.float32))


ACTIVATIONS = {
    "hard_sigmoid_half": Activation("hard_sigmoid_half", 0.5),
    "hard_sigmoid": Activation("hard_sigmoid", 1.0),
}

DEFAULT_ACTIVATION = "hard_sigmoid_half"


def get_activation(name: str) -> Activation:
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ConfigError(
            f"未知激活函数: {name}，可选 {sorted(ACTIVATIONS)}", field="activation"
        ) from None


def activation(x: np.ndarray) -> np.ndarray:
    """σ(x) = max(0, min(x/2, 1))"""
    return ACTIVATIONS[DEFAULT_ACTIVATION](x)


def activation_deriv(x: np.ndarray) -> np.ndarray:
    """(0, 2) 内为 1/2，其余（含拐点）为 0"""
    return ACTIVATIONS[DEFAULT_ACTIVATION].deriv(x)
