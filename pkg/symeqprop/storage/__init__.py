"""
存储模块 - 检查点与指标日志
"""
from .checkpoint import (
    Checkpoint,
    checkpoint_path,
    load_checkpoint,
    prune_checkpoints,
    save_checkpoint,
)
from .metrics import MetricLog, metric_columns, read_metric_log

__all__ = [
    "Checkpoint",
    "checkpoint_path",
    "save_checkpoint",
    "load_checkpoint",
    "prune_checkpoints",
    "MetricLog",
    "metric_columns",
    "read_metric_log",
]
