"""
估计模块 - 逐层学习规则与五种 EP 梯度估计
"""
from .ep import (
    draw_sign,
    estimate_one_sided,
    estimate_random_sign,
    estimate_symmetric,
    readout_ascent,
)
from .learning_rules import dphi_dtheta, vf_half, weight_term_grad
from .pipeline import (
    EstimateResult,
    EstimatorKind,
    PhaseReport,
    check_compatible,
    compute_estimate,
)
from .vector_field import estimate_kp_vf_sym, estimate_vf_sym

__all__ = [
    "EstimatorKind",
    "PhaseReport",
    "EstimateResult",
    "check_compatible",
    "compute_estimate",
    "dphi_dtheta",
    "vf_half",
    "weight_term_grad",
    "readout_ascent",
    "estimate_one_sided",
    "estimate_symmetric",
    "estimate_random_sign",
    "draw_sign",
    "estimate_vf_sym",
    "estimate_kp_vf_sym",
]
