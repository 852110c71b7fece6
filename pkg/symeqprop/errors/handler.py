"""
错误处理器 - 错误分类、退出码、用户友好消息
"""

# 用户友好的错误消息（简洁无技术细节）
ERROR_MESSAGES = {
    "ShapeError": "张量形状不匹配",
    "ConfigError": "配置无效 请检查配置文件",
    "ModeError": "当前连接模式或估计器不支持此操作",
    "NonFiniteError": "数值发散 出现 NaN 或 Inf",
    "ConvergenceError": "松弛未收敛 请增大步数",
    "DataFormatError": "数据文件格式错误",
    "TruncatedFileError": "数据文件被截断",
    "BadMagicError": "不是合法的 IDX 文件",
    "CountMismatchError": "图像数与标签数不一致",
    "LabelRangeError": "标签超出类别范围",
    "CheckpointError": "检查点无法读取",
    "FileNotFoundError": "文件不存在 请检查路径",
    "PermissionError": "没有权限执行此操作",
    "default": "运行失败",
}

# 不可恢复错误 - 重新运行同一配置只会再次失败
UNRECOVERABLE_ERRORS = [
    "ShapeError",
    "ConfigError",
    "ModeError",
    "DataFormatError",
    "TruncatedFileError",
    "BadMagicError",
    "CountMismatchError",
    "LabelRangeError",
    "CheckpointError",
    "FileNotFoundError",
]

_CATEGORIES = {
    "usage": ["ModeError"],
    "validation": ["ConfigError", "ShapeError"],
    "numerical": ["NonFiniteError", "ConvergenceError"],
    "data": [
        "DataFormatError",
        "TruncatedFileError",
        "BadMagicError",
        "CountMismatchError",
        "LabelRangeError",
        "CheckpointError",
        "FileNotFoundError",
        "PermissionError",
    ],
}

# 退出码
EXIT_CODES = {
    "usage": 2,
    "validation": 2,
    "numerical": 3,
    "data": 4,
    "unknown": 1,
}


class ErrorHandler:
    """错误处理器"""

    def get_user_message(self, error: Exception) -> str:
        """
        获取用户友好的错误消息，附带异常自身的说明

        Args:
            error: 异常对象

        Returns:
            简洁的错误消息
        """
        error_type = type(error).__name__
        summary = ERROR_MESSAGES.get(error_type, ERROR_MESSAGES["default"])
        field = getattr(error, "field", None)
        detail = str(error)
        if field:
            return f"{summary} [{field}]: {detail}"
        return f"{summary}: {detail}" if detail else summary

    def is_unrecoverable(self, error: Exception) -> bool:
        """判断是否为不可恢复错误"""
        return type(error).__name__ in UNRECOVERABLE_ERRORS

    def classify_error(self, error: Exception) -> str:
        """
        分类错误类型

        Returns:
            "usage" | "validation" | "numerical" | "data" | "unknown"
        """
        error_type = type(error).__name__
        for category, names in _CATEGORIES.items():
            if error_type in names:
                return category
        return "unknown"

    def exit_code(self, error: Exception) -> int:
        """CLI 退出码"""
        return EXIT_CODES[self.classify_error(error)]
