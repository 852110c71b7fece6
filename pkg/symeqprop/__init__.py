"""
symeqprop - 收敛型循环卷积网络的平衡传播训练

五种梯度估计（单边、随机符号、对称三阶段、VF、KP-VF）与两个梯度基准（BPTT、有限差分）。
"""
from .errors import SymEqPropError
from .estimators import EstimatorKind, compute_estimate
from .network import ArchitectureConfig, ConnectionMode, ConvLayerSpec, LossHead, NetworkState, Parameters
from .trainer import Hyperparams, train

__version__ = "0.1.0"

__all__ = [
    "ArchitectureConfig",
    "ConvLayerSpec",
    "LossHead",
    "ConnectionMode",
    "Parameters",
    "NetworkState",
    "EstimatorKind",
    "compute_estimate",
    "Hyperparams",
    "train",
    "SymEqPropError",
]
