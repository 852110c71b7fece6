"""
数据集容器 - 图像、标签、划分与归一化统计
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ..errors import ConfigError, CountMismatchError, DataFormatError, LabelRangeError
from ..tensor.precision import get_dtype

logger = logging.getLogger(__name__)


class DatasetKind(Enum):
    MNIST = "mnist"
    CIFAR10 = "cifar10"
    SYNTHETIC = "synthetic"


@dataclass(eq=False)
class Dataset:
    """
    images: (N, C, H, W)，归一化之前取值 [0, 1]
    mean/std: 逐通道统计；为 None 表示尚未归一化
    """

    images: np.ndarray
    labels: np.ndarray
    split: str = "train"
    num_classes: int = 10
    mean: np.ndarray | None = None
    std: np.ndarray | None = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.images.ndim != 4:
            raise DataFormatError(f"图像应为 (N,C,H,W)，实际形状 {self.images.shape}")
        if self.images.shape[0] != self.labels.shape[0]:
            raise CountMismatchError(f"图像数 {self.images.shape[0]} 与标签数 {self.labels.shape[0]} 不一致")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.num_classes):
            raise LabelRangeError(
                f"标签超出范围 [0, {self.num_classes}): {self.labels.min()}..{self.labels.max()}"
            )

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def image_shape(self) -> tuple[int, int, int]:
        return tuple(self.images.shape[1:])

    @property
    def is_normalized(self) -> bool:
        return self.mean is not None

    def subset(self, count: int | None) -> "Dataset":
        """取前 count 个样本；None 或 0 表示全部"""
        if not count:
            return self
        if count < 0:
            raise ConfigError(f"子集大小不能为负: {count}", field=f"{self.split}_subset")
        return replace(self, images=self.images[:count], labels=self.labels[:count])

    def normalization_stats(self) -> tuple[np.ndarray, np.ndarray]:
        """逐通道均值与标准差（标准差为 0 的通道记为 1）"""
        mean = self.images.mean(axis=(0, 2, 3))
        std = self.images.std(axis=(0, 2, 3))
        std = np.where(std > 0, std, 1.0)
        return mean, std

    def normalized(self, mean: np.ndarray, std: np.ndarray) -> "Dataset":
        mean = np.asarray(mean, dtype=np.float64)
        std = np.asarray(std, dtype=np.float64)
        if mean.shape != (self.images.shape[1],) or std.shape != mean.shape:
            raise DataFormatError(f"归一化统计形状 {mean.shape} 与通道数 {self.images.shape[1]} 不一致")
        images = (self.images - mean[None, :, None, None]) / std[None, :, None, None]
        return replace(self, images=images.astype(get_dtype()), mean=mean, std=std)

    def raw_bytes(self) -> np.ndarray:
        """还原为 0..255 的像素字节，仅用于未归一化的数据"""
        if self.is_normalized:
            raise DataFormatError("已归一化的数据无法还原为原始字节")
        return np.rint(self.images * 255.0).astype(np.uint8)


def from_bytes(pixels: np.ndarray, labels: np.ndarray, split: str, num_classes: int) -> Dataset:
    """uint8 像素 → [0, 1] 浮点图像"""
    images = (pixels.astype(np.float64) / 255.0).astype(get_dtype())
    return Dataset(images, labels, split, num_classes)


def synthetic_dataset(
    size: int,
    image_shape: tuple[int, int, int] = (1, 8, 8),
    num_classes: int = 2,
    seed: int = 0,
    split: str = "train",
    noise: float = 0.3,
) -> Dataset:
    """
    可分的合成图像任务：每类一个随机原型，样本为原型与噪声的混合

    原型只由 seed 决定，同一 seed 的训练与测试划分共享原型。
    """
    if size < 1:
        raise ConfigError(f"合成数据集大小必须为正: {size}", field="synthetic_size")
    if not 0 <= noise < 1:
        raise ConfigError(f"噪声比例须在 [0, 1): {noise}", field="noise")
    prototypes = np.random.default_rng(seed).random((num_classes, *image_shape))
    rng = np.random.default_rng([seed, 0 if split == "train" else 1])
    labels = rng.integers(0, num_classes, size=size)
    images = (1 - noise) * prototypes[labels] + noise * rng.random((size, *image_shape))
    logger.debug(f"合成数据集 {split}: {size} 个样本, 形状 {image_shape}, {num_classes} 类")
    return Dataset(images.astype(get_dtype()), labels, split, num_classes)
