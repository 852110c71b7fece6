"""
MNIST IDX 格式的读写
"""
import logging
import struct
from pathlib import Path

import numpy as np

from ..errors import BadMagicError, CountMismatchError, TruncatedFileError
from .dataset import Dataset, from_bytes

logger = logging.getLogger(__name__)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
MNIST_CLASSES = 10


def _read_idx(path: Path, magic: int, dims: int) -> np.ndarray:
    data = Path(path).read_bytes()
    header_size = 4 + 4 * dims
    if len(data) < header_size:
        raise TruncatedFileError(f"{path}: 文件长度 {len(data)} 不足以容纳 IDX 头")
    (found,) = struct.unpack(">I", data[:4])
    if found != magic:
        raise BadMagicError(f"{path}: magic 0x{found:08x}，应为 0x{magic:08x}")
    shape = struct.unpack(f">{dims}I", data[4:header_size])
    count = int(np.prod(shape))
    body = data[header_size:]
    if len(body) < count:
        raise TruncatedFileError(f"{path}: 数据 {len(body)} 字节，头部声明 {count} 字节")
    return np.frombuffer(body, dtype=np.uint8, count=count).reshape(shape)


def load_mnist_idx(images_path: str | Path, labels_path: str | Path, split: str = "train") -> Dataset:
    """
    读取一对 IDX 文件，像素缩放到 [0, 1]，形状 (N, 1, H, W)

    Raises:
        TruncatedFileError: 文件过短
        BadMagicError: magic 不符
        CountMismatchError: 图像与标签数量不一致
    """
    pixels = _read_idx(Path(images_path), IMAGES_MAGIC, 3)
    labels = _read_idx(Path(labels_path), LABELS_MAGIC, 1)
    if pixels.shape[0] != labels.shape[0]:
        raise CountMismatchError(f"图像 {pixels.shape[0]} 张，标签 {labels.shape[0]} 个")
    dataset = from_bytes(pixels[:, None], labels.astype(np.int64), split, MNIST_CLASSES)
    logger.info(f"已加载 MNIST {split}: {len(dataset)} 张 {pixels.shape[1]}×{pixels.shape[2]}")
    return dataset


def write_mnist_idx(dataset: Dataset, images_path: str | Path, labels_path: str | Path) -> None:
    """按 IDX 格式写出单通道数据集"""
    pixels = dataset.raw_bytes()
    if pixels.shape[1] != 1:
        raise CountMismatchError(f"IDX 只支持单通道图像，实际 {pixels.shape[1]} 通道")
    count, _, height, width = pixels.shape
    with open(images_path, "wb") as f:
        f.write(struct.pack(">IIII", IMAGES_MAGIC, count, height, width))
        f.write(pixels[:, 0].tobytes())
    with open(labels_path, "wb") as f:
        f.write(struct.pack(">II", LABELS_MAGIC, count))
        f.write(dataset.labels.astype(np.uint8).tobytes())
