"""
CIFAR-10 二进制批文件的读写
"""
import logging
from pathlib import Path

import numpy as np

from ..errors import LabelRangeError, TruncatedFileError
from .dataset import Dataset, from_bytes

logger = logging.getLogger(__name__)

CIFAR_SHAPE = (3, 32, 32)
RECORD_SIZE = 1 + 3 * 32 * 32
CIFAR_CLASSES = 10


def _read_batch(path: Path) -> tuple[np.ndarray, np.ndarray]:
    data = np.fromfile(path, dtype=np.uint8)
    if data.size == 0 or data.size % RECORD_SIZE:
        raise TruncatedFileError(f"{path}: 大小 {data.size} 不是 {RECORD_SIZE} 的正整数倍")
    records = data.reshape(-1, RECORD_SIZE)
    labels = records[:, 0].astype(np.int64)
    if labels.max() >= CIFAR_CLASSES:
        raise LabelRangeError(f"{path}: 标签字节 {labels.max()} 超出 [0, {CIFAR_CLASSES})")
    return records[:, 1:].reshape(-1, *CIFAR_SHAPE), labels


def load_cifar10_bin(paths: str | Path | list, split: str = "train") -> Dataset:
    """读取一个或多个批文件（每条 1 字节标签 + 3072 字节像素），按顺序拼接"""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    if not paths:
        raise TruncatedFileError("没有给出 CIFAR-10 文件")
    pixels, labels = zip(*(_read_batch(Path(p)) for p in paths))
    dataset = from_bytes(np.concatenate(pixels), np.concatenate(labels), split, CIFAR_CLASSES)
    logger.info(f"已加载 CIFAR-10 {split}: {len(dataset)} 张，来自 {len(paths)} 个文件")
    return dataset


def write_cifar10_bin(dataset: Dataset, path: str | Path) -> None:
    pixels = dataset.raw_bytes().reshape(len(dataset), -1)
    if pixels.shape[1] != RECORD_SIZE - 1:
        raise TruncatedFileError(f"图像形状 {dataset.image_shape} 不是 {CIFAR_SHAPE}")
    records = np.concatenate([dataset.labels.astype(np.uint8)[:, None], pixels], axis=1)
    records.tofile(path)
