"""
错误处理模块
"""
from .exceptions import (
    BadMagicError,
    CheckpointError,
    ConfigError,
    ConvergenceError,
    CountMismatchError,
    DataFormatError,
    LabelRangeError,
    ModeError,
    NonFiniteError,
    ShapeError,
    SymEqPropError,
    TruncatedFileError,
)
from .handler import ERROR_MESSAGES, EXIT_CODES, UNRECOVERABLE_ERRORS, ErrorHandler

__all__ = [
    # 处理器
    "ErrorHandler",
    "ERROR_MESSAGES",
    "EXIT_CODES",
    "UNRECOVERABLE_ERRORS",
    # 异常
    "SymEqPropError",
    "ShapeError",
    "ConfigError",
    "ModeError",
    "NonFiniteError",
    "ConvergenceError",
    "DataFormatError",
    "TruncatedFileError",
    "BadMagicError",
    "CountMismatchError",
    "LabelRangeError",
    "CheckpointError",
]
