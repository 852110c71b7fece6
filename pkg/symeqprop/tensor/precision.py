"""
数值精度设置 - f64 为默认，f32 仅供训练提速
"""
import logging

import numpy as np

from ..errors import ConfigError

logger = logging.getLogger(__name__)

_DTYPES = {
    "f64": np.float64,
    "f32": np.float32,
}
PRECISIONS = tuple(_DTYPES)

_current = "f64"


def set_precision(name: str) -> None:
    """设置之后创建的参数、状态与数据集使用的浮点类型"""
    global _current
    if name not in _DTYPES:
        raise ConfigError(f"不支持的精度: {name}，可选 {sorted(_DTYPES)}", field="precision")
    if name != _current:
        logger.info(f"浮点精度切换为 {name}")
    _current = name


def get_precision() -> str:
    return _current


def get_dtype() -> np.dtype:
    return np.dtype(_DTYPES[_current])
