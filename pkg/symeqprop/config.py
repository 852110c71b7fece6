"""
运行配置 - 扁平 JSON 文件 + 命令行覆盖，整体校验后得到类型化的 RunConfig
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .data.augment import AugmentOptions
from .data.loader import DataOptions
from .errors import ConfigError
from .network.architecture import ArchitectureConfig
from .tensor.precision import PRECISIONS
from .trainer.hyperparams import Hyperparams
from .trainer.loop import TrainOptions

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).with_name("_conf_schema.json")

ARCHITECTURE_KEYS = (
    "input_shape",
    "conv_channels",
    "conv_kernels",
    "conv_paddings",
    "conv_pools",
    "fc_layers",
    "num_classes",
    "activation",
    "loss",
    "connection",
)
HYPERPARAM_KEYS = (
    "T",
    "K",
    "beta",
    "learning_rates",
    "final_learning_rate",
    "momentum",
    "weight_decay",
    "bias_weight_decay",
    "batch_size",
    "epochs",
    "cosine_decay_epochs",
    "estimator",
    "dropout_p",
    "dropout_layers",
    "seed",
)


def load_schema() -> dict:
    with open(SCHEMA_PATH, encoding="utf-8") as f:
        return json.load(f)


def default_mapping(schema: dict | None = None) -> dict:
    schema = schema or load_schema()
    return {key: entry["default"] for key, entry in schema.items()}


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def check_value(key: str, value, schema: dict):
    """
    按 schema 检查并规范化单个取值

    Raises:
        ConfigError: 未知键或类型不符，field 为键名
    """
    if key not in schema:
        raise ConfigError(f"未知的配置项: {key}", field=key)
    expected = schema[key]["type"]
    if expected == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} 应为整数，实际 {value!r}", field=key)
        return value
    if expected == "float":
        if not _is_number(value):
            raise ConfigError(f"{key} 应为数值，实际 {value!r}", field=key)
        return float(value)
    if expected == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{key} 应为 true/false，实际 {value!r}", field=key)
        return value
    if expected == "string":
        if not isinstance(value, str):
            raise ConfigError(f"{key} 应为字符串，实际 {value!r}", field=key)
        return value
    if expected == "list":
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} 应为列表，实际 {value!r}", field=key)
        if not all(_is_number(item) or isinstance(item, str) for item in value):
            raise ConfigError(f"{key} 的元素只能是数值或字符串", field=key)
        return list(value)
    raise ConfigError(f"schema 中 {key} 的类型 {expected} 无法识别", field=key)


@dataclass
class RunConfig:
    """一次运行所需的全部配置"""

    architecture: ArchitectureConfig
    hyperparams: Hyperparams
    data: DataOptions
    train_options: TrainOptions
    out_dir: Path
    precision: str = "f64"
    grad_check_betas: list[float] = field(default_factory=lambda: [0.5, 0.25, 0.125])
    grad_check_samples: int = 2
    align_iterations: int = 200
    mapping: dict = field(default_factory=dict, repr=False)


def _int_list(mapping: dict, key: str) -> list[int]:
    values = mapping[key]
    if not all(_is_number(v) and float(v).is_integer() for v in values):
        raise ConfigError(f"{key} 的元素应为整数: {values}", field=key)
    return [int(v) for v in values]


def _float_list(mapping: dict, key: str) -> list[float]:
    values = mapping[key]
    if not all(_is_number(v) for v in values):
        raise ConfigError(f"{key} 的元素应为数值: {values}", field=key)
    return [float(v) for v in values]


def build_run_config(mapping: dict) -> RunConfig:
    """由完整的扁平映射构造并整体校验 RunConfig"""
    arch_values = {key: mapping[key] for key in ARCHITECTURE_KEYS}
    for key in ("input_shape", "conv_channels", "conv_kernels", "conv_paddings", "conv_pools", "fc_layers"):
        arch_values[key] = _int_list(mapping, key)
    architecture = ArchitectureConfig.from_dict(arch_values)

    hp_values = {key: mapping[key] for key in HYPERPARAM_KEYS}
    hp_values["learning_rates"] = _float_list(mapping, "learning_rates")
    hp_values["dropout_layers"] = _int_list(mapping, "dropout_layers")
    hyperparams = Hyperparams.from_dict(hp_values)
    hyperparams.validate(architecture)

    for key in ("train_files", "test_files"):
        if not all(isinstance(v, str) for v in mapping[key]):
            raise ConfigError(f"{key} 的元素应为路径字符串", field=key)
    for key in ("train_subset", "test_subset", "synthetic_size", "checkpoint_every", "keep_checkpoints"):
        if mapping[key] < 0:
            raise ConfigError(f"{key} 不能为负: {mapping[key]}", field=key)
    augment = AugmentOptions(mapping["augment_hflip"], mapping["augment_crop_pad"])
    data = DataOptions(
        dataset=mapping["dataset"],
        train_files=list(mapping["train_files"]),
        test_files=list(mapping["test_files"]),
        train_subset=mapping["train_subset"],
        test_subset=mapping["test_subset"],
        normalize=mapping["normalize"],
        augment=augment,
        synthetic_size=mapping["synthetic_size"] or 1,
        seed=mapping["seed"],
    )
    options = TrainOptions(
        checkpoint_every=mapping["checkpoint_every"],
        keep_checkpoints=mapping["keep_checkpoints"],
        residual_warn=mapping["residual_warn"],
        augment=augment,
    )

    if mapping["precision"] not in PRECISIONS:
        raise ConfigError(f"precision 只能是 {list(PRECISIONS)}: {mapping['precision']}", field="precision")
    betas = _float_list(mapping, "grad_check_betas")
    if not betas or any(beta == 0 for beta in betas):
        raise ConfigError("grad_check_betas 不能为空且不能含 0", field="grad_check_betas")
    if mapping["grad_check_samples"] < 1:
        raise ConfigError("grad_check_samples 必须 ≥ 1", field="grad_check_samples")
    if mapping["align_iterations"] < 0:
        raise ConfigError("align_iterations 不能为负", field="align_iterations")

    return RunConfig(
        architecture=architecture,
        hyperparams=hyperparams,
        data=data,
        train_options=options,
        out_dir=Path(mapping["out_dir"]),
        precision=mapping["precision"],
        grad_check_betas=betas,
        grad_check_samples=mapping["grad_check_samples"],
        align_iterations=mapping["align_iterations"],
        mapping=dict(mapping),
    )


def read_config_file(path: str | Path) -> dict:
    """读取配置文件（一个 JSON 对象），不做类型检查"""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            values = json.load(f)
    except OSError as e:
        raise ConfigError(f"无法读取配置文件 {path}: {e}", field="config") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件 {path} 不是合法 JSON: {e}", field="config") from e
    if not isinstance(values, dict):
        raise ConfigError(f"配置文件 {path} 顶层应为对象", field="config")
    return values


def load_run_config(path: str | Path | None = None, overrides: dict | None = None) -> RunConfig:
    """
    默认值 ← 配置文件 ← 命令行覆盖（None 表示未给出）

    Raises:
        ConfigError: 未知键、类型不符或整体校验失败
    """
    schema = load_schema()
    mapping = default_mapping(schema)
    if path is not None:
        for key, value in read_config_file(path).items():
            mapping[key] = check_value(key, value, schema)
        logger.info(f"已读取配置文件 {path}")
    for key, value in (overrides or {}).items():
        if value is not None:
            mapping[key] = check_value(key, value, schema)
    return build_run_config(mapping)


def save_run_config(run: RunConfig, path: str | Path) -> Path:
    """把生效的扁平配置写回 JSON，便于复现"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(run.mapping, f, indent=2, ensure_ascii=False)
    return path
