"""
按运行配置加载训练与测试数据
"""
import logging
from dataclasses import dataclass, field

from ..errors import ConfigError
from ..network.architecture import ArchitectureConfig
from .augment import AugmentOptions
from .cifar import load_cifar10_bin
from .dataset import Dataset, DatasetKind, synthetic_dataset
from .mnist import load_mnist_idx

logger = logging.getLogger(__name__)


@dataclass
class DataOptions:
    dataset: DatasetKind = DatasetKind.SYNTHETIC
    train_files: list[str] = field(default_factory=list)
    test_files: list[str] = field(default_factory=list)
    train_subset: int = 0
    test_subset: int = 0
    normalize: bool = True
    augment: AugmentOptions = field(default_factory=AugmentOptions)
    synthetic_size: int = 512
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.dataset, str):
            try:
                self.dataset = DatasetKind(self.dataset)
            except ValueError:
                choices = [kind.value for kind in DatasetKind]
                raise ConfigError(f"未知的数据集: {self.dataset}，可选 {choices}", field="dataset") from None


def _load_split(options: DataOptions, files: list[str], split: str, config: ArchitectureConfig) -> Dataset:
    key = f"{split}_files"
    if options.dataset is DatasetKind.MNIST:
        if len(files) != 2:
            raise ConfigError(f"MNIST 需要 [图像文件, 标签文件]，实际 {files}", field=key)
        return load_mnist_idx(files[0], files[1], split)
    if options.dataset is DatasetKind.CIFAR10:
        if not files:
            raise ConfigError("CIFAR-10 至少需要一个批文件", field=key)
        return load_cifar10_bin(files, split)
    size = options.synthetic_size if split == "train" else max(1, options.synthetic_size // 4)
    return synthetic_dataset(size, config.input_shape, config.num_classes, options.seed, split)


def load_datasets(options: DataOptions, config: ArchitectureConfig) -> tuple[Dataset, Dataset]:
    """
    加载、截取子集并用训练集的统计量归一化两个划分

    Raises:
        ConfigError: 图像形状或类别数与网络结构不符
    """
    train = _load_split(options, options.train_files, "train", config).subset(options.train_subset)
    test = _load_split(options, options.test_files, "test", config).subset(options.test_subset)
    for dataset in (train, test):
        if dataset.image_shape != config.input_shape:
            raise ConfigError(
                f"{dataset.split} 图像形状 {dataset.image_shape} 与 input_shape {config.input_shape} 不一致",
                field="input_shape",
            )
        if dataset.num_classes != config.num_classes:
            raise ConfigError(
                f"数据集有 {dataset.num_classes} 类，网络为 {config.num_classes} 类", field="num_classes"
            )
    if options.normalize:
        mean, std = train.normalization_stats()
        train, test = train.normalized(mean, std), test.normalized(mean, std)
    logger.info(f"数据就绪: 训练 {len(train)} 张, 测试 {len(test)} 张 ({options.dataset.value})")
    return train, test
