"""
网络状态 - 各层神经元活动
"""
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError
from ..tensor.precision import get_dtype
from .architecture import ArchitectureConfig


@dataclass(eq=False)
class NetworkState:
    """layers[i] 为 s^{i+1}，均带批维度；s⁰ 即输入 x，不在此保存"""

    layers: list[np.ndarray]

    @classmethod
    def zeros(cls, config: ArchitectureConfig, batch: int) -> "NetworkState":
        dtype = get_dtype()
        return cls(
            [np.zeros((batch, *config.layer_shape(n)), dtype=dtype) for n in range(1, config.num_layers + 1)]
        )

    @property
    def batch_size(self) -> int:
        return self.layers[0].shape[0]

    @property
    def top(self) -> np.ndarray:
        return self.layers[-1]

    def layer(self, n: int) -> np.ndarray:
        """1 起始的层号访问"""
        return self.layers[n - 1]

    def copy(self) -> "NetworkState":
        return NetworkState([layer.copy() for layer in self.layers])

    def with_input(self, x: np.ndarray) -> list[np.ndarray]:
        """[x, s¹, ..., s^L]，下标即层号"""
        return [x, *self.layers]

    def masked(self, masks: Mapping[int, np.ndarray] | None) -> "NetworkState":
        """dropout 掩码作用后的有效活动 m⊙s"""
        if not masks:
            return self
        layers = list(self.layers)
        for n, mask in masks.items():
            if mask.shape != layers[n - 1].shape:
                raise ShapeError(f"第 {n} 层掩码形状 {mask.shape} 与状态 {layers[n - 1].shape} 不一致")
            layers[n - 1] = layers[n - 1] * mask
        return NetworkState(layers)

    def check_shapes(self, config: ArchitectureConfig) -> None:
        if len(self.layers) != config.num_layers:
            raise ShapeError(f"状态层数 {len(self.layers)} 与结构层数 {config.num_layers} 不一致")
        batch = self.batch_size
        for n, layer in enumerate(self.layers, start=1):
            expected = (batch, *config.layer_shape(n))
            if layer.shape != expected:
                raise ShapeError(f"第 {n} 层状态形状 {layer.shape}，应为 {expected}")
