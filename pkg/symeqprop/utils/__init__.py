"""
工具函数模块
"""
from .report import format_table, format_value

__all__ = ["format_table", "format_value"]
