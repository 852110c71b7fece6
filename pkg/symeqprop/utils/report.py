"""
纯文本报表 - 命令行输出用的对齐表格
"""
import math


def format_value(value, float_format: str = ".4g") -> str:
    """
    格式化单元格

    浮点数按 float_format 输出，nan 显示为 "-"，其余转为字符串。
    """
    if isinstance(value, float):
        if math.isnan(value):
            return "-"
        return format(value, float_format)
    if value is None:
        return "-"
    return str(value)


def format_table(rows: list[dict], columns: list[str] | None = None, float_format: str = ".4g") -> str:
    """
    把若干行字典排成左对齐的表格

    Args:
        rows: 每行一个字典
        columns: 列顺序，默认取第一行的键

    Returns:
        表头、分隔线与各行组成的多行字符串；rows 为空时返回空串
    """
    if not rows:
        return ""
    columns = columns or list(rows[0])
    cells = [[format_value(row.get(col), float_format) for col in columns] for row in rows]
    widths = [max(len(col), *(len(line[i]) for line in cells)) for i, col in enumerate(columns)]

    lines = ["  ".join(col.ljust(width) for col, width in zip(columns, widths))]
    lines.append("  ".join("-" * width for width in widths))
    for line in cells:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(line, widths)))
    return "\n".join(lines)
