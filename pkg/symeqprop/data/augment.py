"""
数据增强 - 随机水平翻转与补零后的随机裁剪
"""
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class AugmentOptions:
    hflip: bool = False
    crop_pad: int = 0

    def __post_init__(self):
        if self.crop_pad < 0:
            raise ConfigError(f"裁剪补零不能为负: {self.crop_pad}", field="augment_crop_pad")

    @property
    def enabled(self) -> bool:
        return self.hflip or self.crop_pad > 0


def horizontal_flip(batch: np.ndarray) -> np.ndarray:
    return batch[..., ::-1].copy()


def random_crop(batch: np.ndarray, pad: int, rng: np.random.Generator) -> np.ndarray:
    """每个样本从补零后的画布上独立裁出原尺寸"""
    if pad < 0:
        raise ConfigError(f"裁剪补零不能为负: {pad}", field="augment_crop_pad")
    if pad == 0:
        return batch.copy()
    n, _, height, width = batch.shape
    canvas = np.pad(batch, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    rows = rng.integers(0, 2 * pad + 1, size=n)
    cols = rng.integers(0, 2 * pad + 1, size=n)
    out = np.empty_like(batch)
    for i in range(n):
        out[i] = canvas[i, :, rows[i] : rows[i] + height, cols[i] : cols[i] + width]
    return out


def augment(batch: np.ndarray, rng: np.random.Generator, options: AugmentOptions) -> np.ndarray:
    """逐样本以 1/2 概率翻转，再随机裁剪；选项全关时原样返回"""
    if not options.enabled:
        return batch
    out = batch
    if options.hflip:
        flip = rng.random(batch.shape[0]) < 0.5
        out = batch.copy()
        out[flip] = out[flip][..., ::-1]
    if options.crop_pad:
        out = random_crop(out, options.crop_pad, rng)
    return out
