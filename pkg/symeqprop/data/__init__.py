"""
数据模块 - MNIST / CIFAR-10 读写、合成数据、归一化与增强
"""
from .augment import AugmentOptions, augment, horizontal_flip, random_crop
from .cifar import load_cifar10_bin, write_cifar10_bin
from .dataset import Dataset, DatasetKind, synthetic_dataset
from .loader import DataOptions, load_datasets
from .mnist import load_mnist_idx, write_mnist_idx

__all__ = [
    "Dataset",
    "DatasetKind",
    "DataOptions",
    "synthetic_dataset",
    "load_datasets",
    "load_mnist_idx",
    "write_mnist_idx",
    "load_cifar10_bin",
    "write_cifar10_bin",
    "AugmentOptions",
    "augment",
    "horizontal_flip",
    "random_crop",
]
