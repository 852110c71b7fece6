"""
网络模块 - 结构、参数、状态、原函数与读出
"""
from .architecture import (
    ArchitectureConfig,
    ConnectionMode,
    ConvLayerSpec,
    LossHead,
    cifar10_config,
)
from .params import (
    READOUT,
    GradientEstimate,
    Parameters,
    TensorBundle,
    backward_name,
    bias_name,
    group_of,
    init_params,
    layer_of,
    param_shapes,
    recurrent_names,
    weight_name,
)
from .primitive import (
    feedback_drive,
    feedback_weight,
    forward_drive,
    layer_drive,
    phi,
    phi_tilde,
)
from .readout import (
    loss,
    loss_grad_readout,
    loss_grad_state,
    one_hot,
    predict,
    readout,
    readout_logits,
    softmax,
)
from .state import NetworkState

__all__ = [
    # 结构
    "ArchitectureConfig",
    "ConvLayerSpec",
    "LossHead",
    "ConnectionMode",
    "cifar10_config",
    # 参数
    "TensorBundle",
    "Parameters",
    "GradientEstimate",
    "READOUT",
    "weight_name",
    "bias_name",
    "backward_name",
    "param_shapes",
    "recurrent_names",
    "layer_of",
    "group_of",
    "init_params",
    # 状态
    "NetworkState",
    # 原函数
    "layer_drive",
    "forward_drive",
    "feedback_drive",
    "feedback_weight",
    "phi",
    "phi_tilde",
    # 读出
    "readout",
    "readout_logits",
    "softmax",
    "one_hot",
    "loss",
    "loss_grad_state",
    "loss_grad_readout",
    "predict",
]
