"""
检查点 - 带版本头的具名张量容器（.npz），逐位往返
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from ..errors import CheckpointError, ConfigError
from ..network.architecture import ArchitectureConfig
from ..network.params import GradientEstimate, Parameters, param_shapes

if TYPE_CHECKING:
    from ..trainer.hyperparams import Hyperparams

logger = logging.getLogger(__name__)

FORMAT_NAME = "symeqprop-checkpoint"
FORMAT_VERSION = 1
HEADER_KEY = "__header__"
PARAM_PREFIX = "param__"
MOMENTUM_PREFIX = "momentum__"
NORM_MEAN_KEY = "norm__mean"
NORM_STD_KEY = "norm__std"
FILE_PATTERN = "checkpoint_epoch*.npz"


@dataclass
class Checkpoint:
    params: Parameters
    config: ArchitectureConfig
    hyperparams: "Hyperparams"
    epoch: int
    momentum: GradientEstimate | None = None
    norm_mean: np.ndarray | None = None
    norm_std: np.ndarray | None = None


def checkpoint_path(out_dir: str | Path, epoch: int) -> Path:
    return Path(out_dir) / f"checkpoint_epoch{epoch:04d}.npz"


def save_checkpoint(
    path: str | Path,
    params: Parameters,
    config: ArchitectureConfig,
    hp: "Hyperparams",
    epoch: int,
    momentum: GradientEstimate | None = None,
    norm_mean: np.ndarray | None = None,
    norm_std: np.ndarray | None = None,
) -> Path:
    """写出检查点，返回实际路径"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "epoch": int(epoch),
        "architecture": config.to_dict(),
        "hyperparams": hp.to_dict(),
        "param_names": params.keys(),
    }
    arrays = {HEADER_KEY: np.frombuffer(json.dumps(header).encode("utf-8"), dtype=np.uint8)}
    for name, value in params.items():
        arrays[PARAM_PREFIX + name] = value
    if momentum is not None:
        for name, value in momentum.items():
            arrays[MOMENTUM_PREFIX + name] = value
    if norm_mean is not None:
        arrays[NORM_MEAN_KEY] = np.asarray(norm_mean)
    if norm_std is not None:
        arrays[NORM_STD_KEY] = np.asarray(norm_std)

    with open(path, "wb") as f:
        np.savez(f, **arrays)
    logger.info(f"检查点已保存: {path} (epoch {epoch})")
    return path


def _read_header(data) -> dict:
    if HEADER_KEY not in data.files:
        raise CheckpointError("检查点缺少版本头")
    try:
        header = json.loads(bytes(data[HEADER_KEY]).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointError(f"检查点版本头无法解析: {e}") from e
    if header.get("format") != FORMAT_NAME:
        raise CheckpointError(f"不是本项目的检查点: {header.get('format')}")
    if header.get("version") != FORMAT_VERSION:
        raise CheckpointError(f"不支持的检查点版本: {header.get('version')}")
    return header


def load_checkpoint(path: str | Path) -> Checkpoint:
    """
    读取检查点并校验参数形状

    Raises:
        CheckpointError: 文件损坏、版本不符或参数与结构不一致
    """
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"检查点不存在: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            header = _read_header(data)
            arrays = {key: data[key] for key in data.files if key != HEADER_KEY}
    except CheckpointError:
        raise
    except (OSError, ValueError) as e:
        raise CheckpointError(f"检查点无法读取: {e}") from e

    from ..trainer.hyperparams import Hyperparams

    try:
        config = ArchitectureConfig.from_dict(header["architecture"])
        hp = Hyperparams.from_dict(header["hyperparams"])
    except (KeyError, TypeError, ConfigError) as e:
        raise CheckpointError(f"检查点中的配置无效: {e}") from e

    names = header.get("param_names", [])
    missing = [name for name in names if PARAM_PREFIX + name not in arrays]
    if missing:
        raise CheckpointError(f"检查点缺少参数: {missing}")
    params = Parameters({name: arrays[PARAM_PREFIX + name] for name in names})
    shapes = param_shapes(config)
    if list(shapes) != names or any(params[n].shape != shapes[n] for n in names):
        raise CheckpointError("检查点参数与结构不一致")

    momentum = None
    if any(key.startswith(MOMENTUM_PREFIX) for key in arrays):
        momentum = GradientEstimate({name: arrays[MOMENTUM_PREFIX + name] for name in names})
    return Checkpoint(
        params,
        config,
        hp,
        int(header["epoch"]),
        momentum,
        arrays.get(NORM_MEAN_KEY),
        arrays.get(NORM_STD_KEY),
    )


def prune_checkpoints(out_dir: str | Path, keep: int) -> list[Path]:
    """只保留最新的 keep 个检查点；keep ≤ 0 时不删除"""
    if keep <= 0:
        return []
    files = sorted(Path(out_dir).glob(FILE_PATTERN))
    removed = files[:-keep] if len(files) > keep else []
    for file in removed:
        try:
            file.unlink()
        except OSError as e:
            logger.warning(f"删除旧检查点失败 {file}: {e}")
    if removed:
        logger.info(f"已清理 {len(removed)} 个旧检查点")
    return removed
