"""
张量模块 - 算子、激活函数与精度设置
"""
from .activation import (
    ACTIVATIONS,
    DEFAULT_ACTIVATION,
    Activation,
    activation,
    activation_deriv,
    get_activation,
)
from .ops import (
    PoolIndices,
    Tensor,
    batch_gdot,
    check_finite,
    conv2d,
    conv2d_transpose,
    conv2d_weight_grad,
    flatten,
    gdot,
    maxpool,
    unflatten,
    unpool,
    unpool_transpose,
)
from .precision import PRECISIONS, get_dtype, get_precision, set_precision

__all__ = [
    # 算子
    "Tensor",
    "PoolIndices",
    "check_finite",
    "conv2d",
    "conv2d_transpose",
    "conv2d_weight_grad",
    "maxpool",
    "unpool",
    "unpool_transpose",
    "flatten",
    "unflatten",
    "gdot",
    "batch_gdot",
    # 激活函数
    "Activation",
    "ACTIVATIONS",
    "DEFAULT_ACTIVATION",
    "activation",
    "activation_deriv",
    "get_activation",
    # 精度
    "PRECISIONS",
    "set_precision",
    "get_precision",
    "get_dtype",
]
