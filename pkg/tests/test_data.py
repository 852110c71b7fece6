"""
数据测试 - IDX / CIFAR 二进制读写、合成数据、归一化、增强与加载
"""
import struct

import numpy as np
import numpy.testing as npt
import pytest

from symeqprop.data.augment import AugmentOptions, augment, horizontal_flip, random_crop
from symeqprop.data.cifar import RECORD_SIZE, load_cifar10_bin, write_cifar10_bin
from symeqprop.data.dataset import Dataset, DatasetKind, from_bytes, synthetic_dataset
from symeqprop.data.loader import DataOptions, load_datasets
from symeqprop.data.mnist import IMAGES_MAGIC, LABELS_MAGIC, load_mnist_idx, write_mnist_idx
from symeqprop.errors import (
    BadMagicError,
    ConfigError,
    CountMismatchError,
    DataFormatError,
    LabelRangeError,
    TruncatedFileError,
)
from symeqprop.network.architecture import ArchitectureConfig, ConvLayerSpec

PIXELS = np.array(
    [
        [[0, 255, 128], [1, 2, 3]],
        [[10, 20, 30], [40, 50, 60]],
    ],
    dtype=np.uint8,
)


@pytest.fixture
def idx_files(tmp_path):
    images = tmp_path / "images.idx"
    labels = tmp_path / "labels.idx"
    images.write_bytes(struct.pack(">IIII", IMAGES_MAGIC, 2, 2, 3) + PIXELS.tobytes())
    labels.write_bytes(struct.pack(">II", LABELS_MAGIC, 2) + bytes([7, 3]))
    return images, labels


def cifar_record(label: int, fill: int) -> bytes:
    return bytes([label]) + bytes([fill]) * (RECORD_SIZE - 1)


class TestMnist:
    def test_load(self, idx_files):
        dataset = load_mnist_idx(*idx_files, split="test")
        assert len(dataset) == 2
        assert dataset.images.shape == (2, 1, 2, 3)
        assert dataset.split == "test"
        npt.assert_array_equal(dataset.labels, [7, 3])
        npt.assert_allclose(dataset.images[:, 0], PIXELS / 255.0)

    def test_empty_file(self, tmp_path, idx_files):
        empty = tmp_path / "empty.idx"
        empty.write_bytes(b"")
        with pytest.raises(TruncatedFileError):
            load_mnist_idx(empty, idx_files[1])

    def test_truncated_body(self, tmp_path, idx_files):
        short = tmp_path / "short.idx"
        short.write_bytes(idx_files[0].read_bytes()[:-1])
        with pytest.raises(TruncatedFileError):
            load_mnist_idx(short, idx_files[1])

    def test_bad_magic(self, tmp_path, idx_files):
        images, labels = idx_files
        wrong = tmp_path / "wrong.idx"
        wrong.write_bytes(struct.pack(">IIII", LABELS_MAGIC, 2, 2, 3) + PIXELS.tobytes())
        with pytest.raises(BadMagicError):
            load_mnist_idx(wrong, labels)
        # 图像文件当作标签读
        with pytest.raises(BadMagicError):
            load_mnist_idx(images, images)

    def test_count_mismatch(self, tmp_path, idx_files):
        labels = tmp_path / "labels3.idx"
        labels.write_bytes(struct.pack(">II", LABELS_MAGIC, 3) + bytes([1, 2, 3]))
        with pytest.raises(CountMismatchError):
            load_mnist_idx(idx_files[0], labels)

    def test_write_reproduces_bytes(self, tmp_path, idx_files):
        dataset = load_mnist_idx(*idx_files)
        images, labels = tmp_path / "out_images", tmp_path / "out_labels"
        write_mnist_idx(dataset, images, labels)
        assert images.read_bytes() == idx_files[0].read_bytes()
        assert labels.read_bytes() == idx_files[1].read_bytes()

    def test_write_rejects_multichannel(self, tmp_path):
        dataset = from_bytes(np.zeros((1, 3, 2, 2), dtype=np.uint8), [0], "train", 10)
        with pytest.raises(CountMismatchError):
            write_mnist_idx(dataset, tmp_path / "a", tmp_path / "b")


class TestCifar:
    def test_load(self, tmp_path):
        path = tmp_path / "batch.bin"
        path.write_bytes(cifar_record(4, 255) + cifar_record(9, 0))
        dataset = load_cifar10_bin(path)
        assert dataset.images.shape == (2, 3, 32, 32)
        npt.assert_array_equal(dataset.labels, [4, 9])
        assert np.all(dataset.images[0] == 1.0)
        assert np.all(dataset.images[1] == 0.0)

    def test_concatenates_files(self, tmp_path):
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        a.write_bytes(cifar_record(1, 3))
        b.write_bytes(cifar_record(2, 5) + cifar_record(3, 7))
        dataset = load_cifar10_bin([a, b])
        npt.assert_array_equal(dataset.labels, [1, 2, 3])

    def test_channel_layout(self, tmp_path):
        pixels = np.zeros((3, 32, 32), dtype=np.uint8)
        pixels[0, 0, 1] = 255
        pixels[2, 31, 31] = 51
        path = tmp_path / "layout.bin"
        path.write_bytes(bytes([0]) + pixels.tobytes())
        image = load_cifar10_bin(path).images[0]
        assert image[0, 0, 1] == 1.0
        assert image[2, 31, 31] == pytest.approx(0.2)
        assert image.sum() == pytest.approx(1.2)

    @pytest.mark.parametrize("size", [0, RECORD_SIZE - 1, RECORD_SIZE + 1])
    def test_bad_size(self, tmp_path, size):
        path = tmp_path / "bad.bin"
        path.write_bytes(bytes(size))
        with pytest.raises(TruncatedFileError):
            load_cifar10_bin(path)

    def test_no_files(self):
        with pytest.raises(TruncatedFileError):
            load_cifar10_bin([])

    def test_label_range(self, tmp_path):
        path = tmp_path / "label.bin"
        path.write_bytes(cifar_record(10, 0))
        with pytest.raises(LabelRangeError):
            load_cifar10_bin(path)

    def test_write_reproduces_bytes(self, tmp_path):
        source = tmp_path / "src.bin"
        source.write_bytes(cifar_record(6, 17) + cifar_record(0, 200))
        target = tmp_path / "dst.bin"
        write_cifar10_bin(load_cifar10_bin(source), target)
        assert target.read_bytes() == source.read_bytes()


class TestDataset:
    def test_validation(self):
        with pytest.raises(DataFormatError):
            Dataset(np.zeros((2, 8, 8)), [0, 1])
        with pytest.raises(CountMismatchError):
            Dataset(np.zeros((2, 1, 8, 8)), [0])
        with pytest.raises(LabelRangeError):
            Dataset(np.zeros((1, 1, 8, 8)), [3], num_classes=3)

    def test_subset(self):
        dataset = synthetic_dataset(10)
        assert len(dataset.subset(4)) == 4
        assert dataset.subset(0) is dataset
        assert dataset.subset(None) is dataset
        with pytest.raises(ConfigError) as exc:
            dataset.subset(-1)
        assert exc.value.field == "train_subset"

    def test_normalized(self):
        dataset = synthetic_dataset(64, image_shape=(2, 4, 4))
        mean, std = dataset.normalization_stats()
        normalized = dataset.normalized(mean, std)
        assert normalized.is_normalized
        npt.assert_allclose(normalized.images.mean(axis=(0, 2, 3)), 0.0, atol=1e-12)
        npt.assert_allclose(normalized.images.std(axis=(0, 2, 3)), 1.0)

    def test_constant_channel(self):
        dataset = Dataset(np.full((3, 1, 2, 2), 0.5), [0, 1, 0], num_classes=2)
        _, std = dataset.normalization_stats()
        npt.assert_array_equal(std, [1.0])

    def test_normalized_shape_mismatch(self):
        dataset = synthetic_dataset(4)
        with pytest.raises(DataFormatError):
            dataset.normalized(np.zeros(3), np.ones(3))

    def test_raw_bytes(self, idx_files):
        dataset = load_mnist_idx(*idx_files)
        npt.assert_array_equal(dataset.raw_bytes()[:, 0], PIXELS)
        mean, std = dataset.normalization_stats()
        with pytest.raises(DataFormatError):
            dataset.normalized(mean, std).raw_bytes()


class TestSynthetic:
    def test_deterministic(self):
        a = synthetic_dataset(20, seed=3)
        b = synthetic_dataset(20, seed=3)
        npt.assert_array_equal(a.images, b.images)
        npt.assert_array_equal(a.labels, b.labels)

    def test_splits_differ(self):
        train = synthetic_dataset(20, seed=3, split="train")
        test = synthetic_dataset(20, seed=3, split="test")
        assert not np.array_equal(train.images, test.images)

    def test_range_and_classes(self):
        dataset = synthetic_dataset(50, image_shape=(3, 4, 4), num_classes=5)
        assert dataset.images.shape == (50, 3, 4, 4)
        assert dataset.images.min() >= 0 and dataset.images.max() <= 1
        assert dataset.labels.max() < 5

    @pytest.mark.parametrize(
        "kwargs, field",
        [
            ({"size": 0}, "synthetic_size"),
            ({"size": 4, "noise": 1.0}, "noise"),
            ({"size": 4, "noise": -0.1}, "noise"),
        ],
    )
    def test_invalid(self, kwargs, field):
        with pytest.raises(ConfigError) as exc:
            synthetic_dataset(**kwargs)
        assert exc.value.field == field


class TestAugment:
    def test_disabled_returns_input(self, rng):
        batch = rng.random((2, 1, 4, 4))
        assert augment(batch, rng, AugmentOptions()) is batch

    def test_horizontal_flip(self):
        batch = np.arange(6.0).reshape(1, 1, 2, 3)
        npt.assert_array_equal(horizontal_flip(batch)[0, 0], [[2, 1, 0], [5, 4, 3]])

    def test_flip_is_per_sample(self, rng):
        batch = np.tile(np.arange(4.0), (64, 1, 4, 1))
        out = augment(batch, rng, AugmentOptions(hflip=True))
        flipped = np.all(out[:, 0, 0] == [3, 2, 1, 0], axis=1)
        kept = np.all(out[:, 0, 0] == [0, 1, 2, 3], axis=1)
        assert np.all(flipped | kept)
        assert 0 < flipped.sum() < 64

    def test_crop_keeps_shape(self, rng):
        batch = rng.random((5, 2, 6, 6))
        out = random_crop(batch, 2, rng)
        assert out.shape == batch.shape

    def test_crop_is_shift(self, rng):
        batch = np.ones((20, 1, 4, 4))
        out = random_crop(batch, 1, rng)
        # 平移后每张图至多丢掉一行一列
        assert np.all(out.sum(axis=(1, 2, 3)) >= 9)
        assert np.isin(out, [0.0, 1.0]).all()

    def test_crop_zero_pad_copies(self, rng):
        batch = rng.random((2, 1, 3, 3))
        out = random_crop(batch, 0, rng)
        npt.assert_array_equal(out, batch)
        assert out is not batch

    def test_negative_pad(self, rng):
        with pytest.raises(ConfigError):
            AugmentOptions(crop_pad=-1)
        with pytest.raises(ConfigError):
            random_crop(np.zeros((1, 1, 2, 2)), -1, rng)


class TestLoader:
    def toy_config(self, **kwargs):
        return ArchitectureConfig((1, 8, 8), (ConvLayerSpec(2, 3, 1, 2),), (), 3, **kwargs)

    def test_synthetic(self):
        options = DataOptions(synthetic_size=40, seed=1)
        train, test = load_datasets(options, self.toy_config())
        assert len(train) == 40 and len(test) == 10
        assert train.is_normalized and test.is_normalized
        npt.assert_array_equal(train.mean, test.mean)

    def test_subset_and_no_normalize(self):
        options = DataOptions(synthetic_size=40, train_subset=8, test_subset=2, normalize=False)
        train, test = load_datasets(options, self.toy_config())
        assert (len(train), len(test)) == (8, 2)
        assert not train.is_normalized

    def test_dataset_from_string(self):
        assert DataOptions(dataset="cifar10").dataset is DatasetKind.CIFAR10
        with pytest.raises(ConfigError) as exc:
            DataOptions(dataset="imagenet")
        assert exc.value.field == "dataset"

    def test_mnist_file_count(self):
        options = DataOptions(dataset="mnist", train_files=["only-one"])
        with pytest.raises(ConfigError) as exc:
            load_datasets(options, self.toy_config())
        assert exc.value.field == "train_files"

    def test_shape_mismatch(self, idx_files):
        files = [str(p) for p in idx_files]
        options = DataOptions(dataset="mnist", train_files=files, test_files=files)
        with pytest.raises(ConfigError) as exc:
            load_datasets(options, self.toy_config())
        assert exc.value.field == "input_shape"
