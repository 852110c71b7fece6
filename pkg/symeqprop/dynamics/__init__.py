"""
动力学模块 - 自由阶段与推动阶段的松弛
"""
from .relax import RelaxReport, Trajectory, relax, residual
from .step import Masks, Nudge, pre_activations, step, step_with_indices

__all__ = [
    "Nudge",
    "Masks",
    "pre_activations",
    "step",
    "step_with_indices",
    "relax",
    "residual",
    "RelaxReport",
    "Trajectory",
]
