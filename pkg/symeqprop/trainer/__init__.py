"""
训练模块 - 超参数、优化器、dropout、对齐角与训练循环
"""
from .alignment import AlignmentTrace, alignment_angle, alignment_trace, layer_angles
from .dropout import default_dropout_layers, dropout_mask, sample_masks
from .hyperparams import Hyperparams
from .loop import (
    TrainOptions,
    TrainResult,
    VarianceReport,
    estimator_variance_study,
    evaluate,
    iterate_minibatches,
    train,
)
from .optimizer import (
    OptimizerState,
    cosine_lr,
    is_shared,
    kp_step,
    scheduled_rates,
    sgd_step,
    weight_gap,
)

__all__ = [
    "Hyperparams",
    "OptimizerState",
    "cosine_lr",
    "scheduled_rates",
    "sgd_step",
    "kp_step",
    "is_shared",
    "weight_gap",
    "dropout_mask",
    "sample_masks",
    "default_dropout_layers",
    "alignment_angle",
    "layer_angles",
    "alignment_trace",
    "AlignmentTrace",
    "TrainOptions",
    "TrainResult",
    "VarianceReport",
    "evaluate",
    "iterate_minibatches",
    "train",
    "estimator_variance_study",
]
