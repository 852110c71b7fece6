"""
Dropout 掩码 - 每次迭代抽取一次，在自由与推动各阶段共用
"""
import numpy as np

from ..errors import ConfigError
from ..network.architecture import ArchitectureConfig
from ..tensor.precision import get_dtype


def dropout_mask(shape: tuple[int, ...], p: float, rng: np.random.Generator) -> np.ndarray:
    """以概率 p 置 0，其余为 1/(1−p)，期望为 1"""
    if not 0 <= p < 1:
        raise ConfigError(f"dropout 概率须在 [0, 1): {p}", field="dropout_p")
    if p == 0:
        return np.ones(shape, dtype=get_dtype())
    keep = rng.random(shape) >= p
    return (keep / (1.0 - p)).astype(get_dtype())


def default_dropout_layers(config: ArchitectureConfig) -> tuple[int, ...]:
    """未指定时作用于最后一个卷积层；没有卷积层时不作用"""
    return (config.n_conv,) if config.n_conv else ()


def sample_masks(
    config: ArchitectureConfig,
    batch: int,
    p: float,
    rng: np.random.Generator,
    layers: tuple[int, ...] = (),
) -> dict[int, np.ndarray]:
    """为一个小批抽取掩码，批内各样本各不相同；p = 0 时返回空字典"""
    if p == 0:
        return {}
    layers = layers or default_dropout_layers(config)
    return {n: dropout_mask((batch, *config.layer_shape(n)), p, rng) for n in layers}
