"""
网络结构描述 - 卷积层、全连接层、损失头与连接模式
"""
from dataclasses import dataclass, field
from enum import Enum

from ..errors import ConfigError
from ..tensor.activation import DEFAULT_ACTIVATION, Activation, get_activation


class LossHead(Enum):
    """输出层类型"""

    SQUARED_ERROR = "squared_error"
    SOFTMAX_READOUT = "softmax_readout"


class ConnectionMode(Enum):
    """层间连接方式"""

    BIDIRECTIONAL = "bidirectional"      # 反向使用前向权重的转置
    UNIDIRECTIONAL = "unidirectional"    # 独立的反向权重 wᵇ


@dataclass(frozen=True)
class ConvLayerSpec:
    """卷积层：输出通道、卷积核大小、补零、池化窗口"""

    out_channels: int
    kernel: int = 3
    padding: int = 1
    pool: int = 2


@dataclass(frozen=True)
class ArchitectureConfig:
    """
    网络结构

    状态层 s¹..s^L 先是全部卷积层，再是全部全连接层。
    SquaredError 头的最后一层即输出层；SoftmaxReadout 头另有读出矩阵 w_out。
    """

    input_shape: tuple[int, int, int]
    conv_layers: tuple[ConvLayerSpec, ...] = ()
    fc_layers: tuple[int, ...] = ()
    num_classes: int = 10
    activation: str = DEFAULT_ACTIVATION
    loss: LossHead = LossHead.SOFTMAX_READOUT
    connection: ConnectionMode = ConnectionMode.BIDIRECTIONAL
    _shapes: tuple = field(init=False, repr=False, compare=False, default=())

    def __post_init__(self):
        object.__setattr__(self, "input_shape", tuple(int(v) for v in self.input_shape))
        object.__setattr__(self, "conv_layers", tuple(self.conv_layers))
        object.__setattr__(self, "fc_layers", tuple(int(v) for v in self.fc_layers))
        if isinstance(self.loss, str):
            object.__setattr__(self, "loss", _enum_value(LossHead, self.loss, "loss"))
        if isinstance(self.connection, str):
            object.__setattr__(
                self, "connection", _enum_value(ConnectionMode, self.connection, "connection")
            )
        object.__setattr__(self, "_shapes", self._validate())

    def _validate(self) -> tuple:
        if len(self.input_shape) != 3 or min(self.input_shape) < 1:
            raise ConfigError(f"输入形状应为正的 (C,H,W)，实际 {self.input_shape}", field="input_shape")
        if self.num_layers < 1:
            raise ConfigError("网络至少需要一个状态层", field="conv_channels")
        if self.num_classes < 1:
            raise ConfigError(f"类别数必须为正: {self.num_classes}", field="num_classes")
        get_activation(self.activation)

        shapes = [self.input_shape]
        channels, height, width = self.input_shape
        for n, spec in enumerate(self.conv_layers, start=1):
            if spec.out_channels < 1 or spec.kernel < 1 or spec.pool < 1:
                raise ConfigError(f"第 {n} 个卷积层参数必须为正: {spec}", field="conv_channels")
            if spec.padding < 0:
                raise ConfigError(f"第 {n} 个卷积层 padding 不能为负", field="conv_paddings")
            height = height + 2 * spec.padding - spec.kernel + 1
            width = width + 2 * spec.padding - spec.kernel + 1
            if height < 1 or width < 1:
                raise ConfigError(f"第 {n} 个卷积层输出尺寸非正: {(height, width)}", field="conv_kernels")
            if height % spec.pool or width % spec.pool:
                raise ConfigError(
                    f"第 {n} 个卷积层输出 {(height, width)} 不能被池化大小 {spec.pool} 整除",
                    field="conv_pools",
                )
            channels, height, width = spec.out_channels, height // spec.pool, width // spec.pool
            shapes.append((channels, height, width))
        for size in self.fc_layers:
            if size < 1:
                raise ConfigError(f"全连接层大小必须为正: {size}", field="fc_layers")
            shapes.append((size,))

        if self.loss is LossHead.SQUARED_ERROR:
            last = 1
            for extent in shapes[-1]:
                last *= extent
            if last != self.num_classes:
                raise ConfigError(
                    f"SquaredError 头要求最后一层维度 {last} 等于类别数 {self.num_classes}",
                    field="num_classes",
                )
        return tuple(shapes)

    # ---- 派生量 ----

    @property
    def act(self) -> Activation:
        return get_activation(self.activation)

    @property
    def n_conv(self) -> int:
        return len(self.conv_layers)

    @property
    def n_fc(self) -> int:
        return len(self.fc_layers)

    @property
    def num_layers(self) -> int:
        """状态层数 L"""
        return self.n_conv + self.n_fc

    @property
    def has_readout(self) -> bool:
        return self.loss is LossHead.SOFTMAX_READOUT

    @property
    def unidirectional(self) -> bool:
        return self.connection is ConnectionMode.UNIDIRECTIONAL

    @property
    def num_groups(self) -> int:
        """学习率分组数：每个权重层一组，读出层单独一组"""
        return self.num_layers + (1 if self.has_readout else 0)

    def layer_shape(self, n: int) -> tuple[int, ...]:
        """sⁿ 的形状（不含批维度），n = 0 为输入"""
        return self._shapes[n]

    def flat_size(self, n: int) -> int:
        size = 1
        for extent in self._shapes[n]:
            size *= extent
        return size

    def is_conv(self, n: int) -> bool:
        return 1 <= n <= self.n_conv

    def conv_spec(self, n: int) -> ConvLayerSpec:
        return self.conv_layers[n - 1]

    def weight_shape(self, n: int) -> tuple[int, ...]:
        if self.is_conv(n):
            spec = self.conv_spec(n)
            in_channels = self._shapes[n - 1][0]
            return (spec.out_channels, in_channels, spec.kernel, spec.kernel)
        return (self.flat_size(n), self.flat_size(n - 1))

    # ---- 序列化 ----

    def to_dict(self) -> dict:
        return {
            "input_shape": list(self.input_shape),
            "conv_channels": [spec.out_channels for spec in self.conv_layers],
            "conv_kernels": [spec.kernel for spec in self.conv_layers],
            "conv_paddings": [spec.padding for spec in self.conv_layers],
            "conv_pools": [spec.pool for spec in self.conv_layers],
            "fc_layers": list(self.fc_layers),
            "num_classes": self.num_classes,
            "activation": self.activation,
            "loss": self.loss.value,
            "connection": self.connection.value,
        }

    @classmethod
    def from_dict(cls, values: dict) -> "ArchitectureConfig":
        channels = list(values.get("conv_channels", []))
        columns = {
            "conv_kernels": list(values.get("conv_kernels", [3] * len(channels))),
            "conv_paddings": list(values.get("conv_paddings", [1] * len(channels))),
            "conv_pools": list(values.get("conv_pools", [2] * len(channels))),
        }
        for key, column in columns.items():
            if len(column) != len(channels):
                raise ConfigError(
                    f"{key} 长度 {len(column)} 与 conv_channels 长度 {len(channels)} 不一致", field=key
                )
        conv_layers = tuple(
            ConvLayerSpec(int(c), int(k), int(p), int(f))
            for c, k, p, f in zip(
                channels, columns["conv_kernels"], columns["conv_paddings"], columns["conv_pools"]
            )
        )
        return cls(
            input_shape=tuple(values["input_shape"]),
            conv_layers=conv_layers,
            fc_layers=tuple(values.get("fc_layers", [])),
            num_classes=int(values.get("num_classes", 10)),
            activation=values.get("activation", DEFAULT_ACTIVATION),
            loss=values.get("loss", LossHead.SOFTMAX_READOUT.value),
            connection=values.get("connection", ConnectionMode.BIDIRECTIONAL.value),
        )


def _enum_value(enum_cls, value: str, field_name: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = [member.value for member in enum_cls]
        raise ConfigError(f"{field_name} 取值无效: {value}，可选 {choices}", field=field_name) from None


def cifar10_config(
    loss: LossHead = LossHead.SOFTMAX_READOUT,
    connection: ConnectionMode = ConnectionMode.BIDIRECTIONAL,
) -> ArchitectureConfig:
    """CIFAR-10 的四层卷积网络：128-256-512-512，最后一层不补零"""
    conv = (
        ConvLayerSpec(128, 3, 1, 2),
        ConvLayerSpec(256, 3, 1, 2),
        ConvLayerSpec(512, 3, 1, 2),
        ConvLayerSpec(512, 3, 0, 2),
    )
    fc = (10,) if loss is LossHead.SQUARED_ERROR else ()
    return ArchitectureConfig((3, 32, 32), conv, fc, 10, DEFAULT_ACTIVATION, loss, connection)
