"""
训练超参数
"""
from dataclasses import asdict, dataclass, field, fields

from ..errors import ConfigError, ModeError
from ..estimators.pipeline import EstimatorKind, check_compatible
from ..network.architecture import ArchitectureConfig


@dataclass
class Hyperparams:
    """默认值取自 CIFAR-10 平方误差头的设置"""

    T: int = 250
    K: int = 30
    beta: float = 0.5
    learning_rates: tuple[float, ...] = (0.25, 0.15, 0.1, 0.08, 0.05)
    final_learning_rate: float = 1e-5
    momentum: float = 0.9
    weight_decay: float = 3e-4
    bias_weight_decay: bool = True
    batch_size: int = 128
    epochs: int = 120
    cosine_decay_epochs: int = 100
    estimator: EstimatorKind = EstimatorKind.SYMMETRIC
    dropout_p: float = 0.0
    dropout_layers: tuple[int, ...] = field(default_factory=tuple)
    seed: int = 0

    def __post_init__(self):
        self.estimator = EstimatorKind.parse(self.estimator)
        self.learning_rates = tuple(float(lr) for lr in self.learning_rates)
        self.dropout_layers = tuple(int(n) for n in self.dropout_layers)

    def validate(self, config: ArchitectureConfig) -> None:
        """
        检查各项取值及其与网络结构的一致性

        Raises:
            ConfigError: 字段取值非法，field 为字段名
        """
        if self.T < 1:
            raise ConfigError(f"T 必须 ≥ 1: {self.T}", field="T")
        if self.K < 1:
            raise ConfigError(f"K 必须 ≥ 1: {self.K}", field="K")
        if self.beta == 0:
            raise ConfigError("β 不能为 0", field="beta")
        if not 0 <= self.dropout_p < 1:
            raise ConfigError(f"dropout 概率须在 [0, 1): {self.dropout_p}", field="dropout_p")
        for n in self.dropout_layers:
            if not 1 <= n <= config.num_layers:
                raise ConfigError(f"dropout 层号 {n} 超出 [1, {config.num_layers}]", field="dropout_layers")
        if len(self.learning_rates) != config.num_groups:
            raise ConfigError(
                f"学习率个数 {len(self.learning_rates)} 与参数组数 {config.num_groups} 不一致",
                field="learning_rates",
            )
        if any(lr <= 0 for lr in self.learning_rates) or self.final_learning_rate < 0:
            raise ConfigError("学习率必须为正", field="learning_rates")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"动量须在 [0, 1): {self.momentum}", field="momentum")
        if self.weight_decay < 0:
            raise ConfigError(f"权重衰减不能为负: {self.weight_decay}", field="weight_decay")
        if self.batch_size < 1:
            raise ConfigError(f"批大小必须 ≥ 1: {self.batch_size}", field="batch_size")
        if self.epochs < 0:
            raise ConfigError(f"轮数不能为负: {self.epochs}", field="epochs")
        if self.cosine_decay_epochs <= 0:
            raise ConfigError(f"余弦衰减轮数必须为正: {self.cosine_decay_epochs}", field="cosine_decay_epochs")
        try:
            check_compatible(self.estimator, config)
        except ModeError as e:
            raise ConfigError(str(e), field="estimator") from e
        if self.estimator is EstimatorKind.KP_VF_SYM:
            for lr in (*self.learning_rates, self.final_learning_rate):
                if abs(1 - lr * self.weight_decay) >= 1:
                    raise ConfigError(
                        f"Kolen-Pollack 需要 |1 − ηλ| < 1，当前 η={lr:g}, λ={self.weight_decay:g}",
                        field="weight_decay",
                    )

    def to_dict(self) -> dict:
        data = asdict(self)
        data["estimator"] = self.estimator.value
        data["learning_rates"] = list(self.learning_rates)
        data["dropout_layers"] = list(self.dropout_layers)
        return data

    @classmethod
    def from_dict(cls, values: dict) -> "Hyperparams":
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in values.items() if key in known})
