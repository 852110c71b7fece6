"""
基准模块 - BPTT、有限差分、偏差阶数检验与截断梯度曲线
"""
from .bptt import BPTTResult, bptt, bptt_gradient
from .compare import (
    cosine_similarity,
    descent_view,
    layer_names,
    max_abs_deviation,
    relative_error,
)
from .finite_diff import finite_diff_loss_grad, numerical_gradient, steady_state_loss
from .gdu import CURVE_COLUMNS, TruncatedCurve, gdu_curves, write_curve_csv
from .theorem import DeviationReport, SweepReport, lemma_sweep, theorem1_check

__all__ = [
    "BPTTResult",
    "bptt",
    "bptt_gradient",
    "numerical_gradient",
    "steady_state_loss",
    "finite_diff_loss_grad",
    "descent_view",
    "relative_error",
    "max_abs_deviation",
    "cosine_similarity",
    "layer_names",
    "DeviationReport",
    "SweepReport",
    "theorem1_check",
    "lemma_sweep",
    "TruncatedCurve",
    "CURVE_COLUMNS",
    "gdu_curves",
    "write_curve_csv",
]
