"""
参数容器与初始化

命名约定：w{n}/b{n} 为第 n 层前向权重与偏置，wb{n} 为反向权重（单向模式，n ≥ 2），
w_out 为 SoftmaxReadout 的读出矩阵。
"""
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteError, ShapeError
from ..tensor.precision import get_dtype
from .architecture import ArchitectureConfig

READOUT = "w_out"


def weight_name(n: int) -> str:
    return f"w{n}"


def bias_name(n: int) -> str:
    return f"b{n}"


def backward_name(n: int) -> str:
    return f"wb{n}"


@dataclass(eq=False)
class TensorBundle:
    """按名字索引的一组张量，参数与梯度估计共用"""

    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def __setitem__(self, name: str, value: np.ndarray) -> None:
        self.tensors[name] = value

    def __contains__(self, name: str) -> bool:
        return name in self.tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self.tensors)

    def __len__(self) -> int:
        return len(self.tensors)

    def keys(self) -> list[str]:
        return list(self.tensors)

    def items(self):
        return self.tensors.items()

    def copy(self):
        return type(self)({name: value.copy() for name, value in self.tensors.items()})

    def map(self, fn: Callable[[np.ndarray], np.ndarray]):
        return type(self)({name: fn(value) for name, value in self.tensors.items()})

    def combine(self, other: "TensorBundle", fn: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        self.assert_congruent(other)
        return type(self)({name: fn(value, other[name]) for name, value in self.tensors.items()})

    def __add__(self, other):
        return self.combine(other, np.add)

    def __sub__(self, other):
        return self.combine(other, np.subtract)

    def scale(self, factor: float):
        return self.map(lambda value: value * factor)

    def assert_congruent(self, other: "TensorBundle") -> None:
        if set(self.tensors) != set(other.tensors):
            raise ShapeError(f"张量名不一致: {sorted(self.tensors)} 与 {sorted(other.tensors)}")
        for name, value in self.tensors.items():
            if value.shape != other[name].shape:
                raise ShapeError(f"{name} 形状不一致: {value.shape} 与 {other[name].shape}")

    def check_finite(self, what: str = "张量") -> None:
        for name, value in self.tensors.items():
            if not np.all(np.isfinite(value)):
                raise NonFiniteError(f"{what} {name} 含有 NaN 或 Inf")

    def norm(self, names: list[str] | None = None) -> float:
        names = self.keys() if names is None else names
        return float(np.sqrt(sum(np.sum(self.tensors[name] ** 2) for name in names)))

    def flat(self, names: list[str] | None = None) -> np.ndarray:
        names = self.keys() if names is None else names
        if not names:
            return np.zeros(0)
        return np.concatenate([self.tensors[name].ravel() for name in names])


class Parameters(TensorBundle):
    """网络全部可训练参数"""

    def weight(self, n: int) -> np.ndarray:
        return self.tensors[weight_name(n)]

    def bias(self, n: int) -> np.ndarray:
        return self.tensors[bias_name(n)]

    def backward(self, n: int) -> np.ndarray:
        return self.tensors[backward_name(n)]

    @property
    def readout(self) -> np.ndarray | None:
        return self.tensors.get(READOUT)


class GradientEstimate(TensorBundle):
    """与 Parameters 同构的梯度（或估计）容器"""

    @classmethod
    def zeros_like(cls, params: TensorBundle) -> "GradientEstimate":
        return cls({name: np.zeros_like(value) for name, value in params.items()})


def param_shapes(config: ArchitectureConfig) -> dict[str, tuple[int, ...]]:
    """按初始化顺序列出全部参数形状"""
    shapes: dict[str, tuple[int, ...]] = {}
    for n in range(1, config.num_layers + 1):
        shape = config.weight_shape(n)
        shapes[weight_name(n)] = shape
        shapes[bias_name(n)] = (shape[0],)
    if config.unidirectional:
        for n in range(2, config.num_layers + 1):
            shapes[backward_name(n)] = config.weight_shape(n)
    if config.has_readout:
        shapes[READOUT] = (config.num_classes, config.flat_size(config.num_layers))
    return shapes


def recurrent_names(config: ArchitectureConfig) -> list[str]:
    """参与动力学的参数名（不含读出矩阵）"""
    return [name for name in param_shapes(config) if name != READOUT]


def layer_of(name: str) -> int:
    """参数所属的层号；w_out 返回 0"""
    if name == READOUT:
        return 0
    return int(name.lstrip("wb"))


def group_of(name: str, config: ArchitectureConfig) -> int:
    """学习率分组：第 n 层的权重、偏置与反向权重同属 n−1 组，读出层为最后一组"""
    if name == READOUT:
        return config.num_layers
    return layer_of(name) - 1


def fan_in(name: str, config: ArchitectureConfig) -> int:
    if name == READOUT:
        return config.flat_size(config.num_layers)
    shape = config.weight_shape(layer_of(name))
    size = 1
    for extent in shape[1:]:
        size *= extent
    return size


def init_params(config: ArchitectureConfig, seed: int) -> Parameters:
    """
    均匀 Kaiming 初始化，权重与偏置的界均为 1/√fan_in

    前向与反向权重各自独立抽样；同一 seed 得到逐字节相同的结果。
    """
    rng = np.random.default_rng(seed)
    dtype = get_dtype()
    tensors = {}
    for name, shape in param_shapes(config).items():
        bound = 1.0 / np.sqrt(fan_in(name, config))
        tensors[name] = rng.uniform(-bound, bound, size=shape).astype(dtype)
    return Parameters(tensors)
