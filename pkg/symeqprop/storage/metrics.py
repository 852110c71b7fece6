"""
指标日志 - 只追加的 CSV，行按 (epoch, iter) 单调递增
"""
import csv
import logging
from pathlib import Path

from ..errors import ConfigError

logger = logging.getLogger(__name__)

BASE_COLUMNS = [
    "epoch",
    "iter",
    "phase_residual_free",
    "phase_residual_pos",
    "phase_residual_neg",
    "train_loss",
    "train_err",
    "test_err",
]


def metric_columns(num_groups: int, angle_layers: list[int] | None = None) -> list[str]:
    """表头：基础列、各组学习率、各层对齐角"""
    columns = list(BASE_COLUMNS)
    columns += [f"lr_{i}" for i in range(num_groups)]
    columns += [f"angle_layer_{n}" for n in angle_layers or []]
    return columns


def _format(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


class MetricLog:
    """单写者的指标日志"""

    def __init__(self, path: str | Path, columns: list[str]):
        self.path = Path(path)
        self.columns = list(columns)
        self._last: tuple[int, int] | None = None
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, "w", encoding="utf-8", newline="")
        self._writer = csv.DictWriter(self._file, fieldnames=self.columns)
        self._writer.writeheader()
        self._file.flush()

    def append(self, row: dict) -> None:
        """
        追加一行

        Raises:
            ConfigError: 出现未知列，或 (epoch, iter) 未严格递增
        """
        unknown = set(row) - set(self.columns)
        if unknown:
            raise ConfigError(f"指标日志中没有这些列: {sorted(unknown)}", field="metrics")
        key = (int(row["epoch"]), int(row["iter"]))
        if self._last is not None and key <= self._last:
            raise ConfigError(f"指标行必须单调递增: {key} 不大于 {self._last}", field="metrics")
        self._last = key
        self._writer.writerow({name: _format(row.get(name, "")) for name in self.columns})
        self._file.flush()

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()

    def __enter__(self) -> "MetricLog":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_metric_log(path: str | Path) -> list[dict]:
    """读回指标日志，数值列转为 float（epoch、iter 为 int）"""
    rows = []
    with open(path, encoding="utf-8", newline="") as f:
        for raw in csv.DictReader(f):
            row = {}
            for name, value in raw.items():
                if value == "":
                    row[name] = None
                elif name in ("epoch", "iter"):
                    row[name] = int(value)
                else:
                    row[name] = float(value)
            rows.append(row)
    return rows
