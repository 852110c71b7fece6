"""
异常类型 - 整个包共用的错误层级
"""


class SymEqPropError(Exception):
    """所有库内错误的基类"""


class ShapeError(SymEqPropError, ValueError):
    """张量形状不匹配"""


class ConfigError(SymEqPropError, ValueError):
    """配置校验失败，field 指出出错的字段"""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ModeError(SymEqPropError, ValueError):
    """连接模式或估计器类型与调用的操作不符"""


class NonFiniteError(SymEqPropError, ArithmeticError):
    """出现 NaN/Inf"""

    def __init__(self, message: str, step: int | None = None, layer: int | None = None):
        super().__init__(message)
        self.step = step
        self.layer = layer


class ConvergenceError(SymEqPropError, ArithmeticError):
    """松弛没有收敛到要求的残差以内"""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DataFormatError(SymEqPropError, ValueError):
    """数据文件格式错误"""


class TruncatedFileError(DataFormatError):
    """文件被截断或为空"""


class BadMagicError(DataFormatError):
    """IDX 魔数不正确"""


class CountMismatchError(DataFormatError):
    """图像数与标签数不一致"""


class LabelRangeError(DataFormatError):
    """标签超出类别范围"""


class CheckpointError(SymEqPropError, ValueError):
    """检查点文件无法读取或版本不兼容"""
