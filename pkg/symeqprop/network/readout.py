"""
输出头 - softmax 读出、损失及其梯度、预测
"""
import numpy as np

from ..errors import ShapeError
from ..tensor.ops import flatten
from .architecture import ArchitectureConfig, LossHead
from .params import Parameters
from .state import NetworkState


def _as_rows(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s)
    if s.ndim == 1:
        return s[None]
    return flatten(s) if s.ndim > 2 else s


def readout_logits(s_last: np.ndarray, w_out: np.ndarray) -> np.ndarray:
    rows = _as_rows(s_last)
    if w_out.ndim != 2 or w_out.shape[1] != rows.shape[1]:
        raise ShapeError(f"读出矩阵 {w_out.shape} 与最后一层 {np.shape(s_last)} 不匹配")
    return rows @ w_out.T


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def readout(s_last: np.ndarray, w_out: np.ndarray) -> np.ndarray:
    """ŷ = softmax(w_out·flatten(s))，每个样本的概率和为 1"""
    probs = softmax(readout_logits(s_last, w_out))
    return probs[0] if np.ndim(s_last) == 1 else probs


def one_hot(labels: np.ndarray, num_classes: int, dtype=np.float64) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros((labels.shape[0], num_classes), dtype=dtype)
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def _check_target(y: np.ndarray, rows: int, width: int) -> None:
    if y.shape != (rows, width):
        raise ShapeError(f"目标形状 {y.shape}，应为 {(rows, width)}")


def loss(state: NetworkState, y: np.ndarray, params: Parameters, config: ArchitectureConfig) -> np.ndarray:
    """逐样本损失 ℓ：平方误差的一半，或读出的交叉熵"""
    top = _as_rows(state.top)
    _check_target(y, top.shape[0], config.num_classes)
    if config.loss is LossHead.SQUARED_ERROR:
        return 0.5 * np.sum((top - y) ** 2, axis=1)
    logits = readout_logits(top, params.readout)
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return -np.sum(y * log_probs, axis=1)


def loss_grad_state(
    state: NetworkState, y: np.ndarray, params: Parameters, config: ArchitectureConfig
) -> np.ndarray:
    """∂ℓ/∂s^L，逐样本，形状同 s^L"""
    top = _as_rows(state.top)
    _check_target(y, top.shape[0], config.num_classes)
    if config.loss is LossHead.SQUARED_ERROR:
        grad = top - y
    else:
        w_out = params.readout
        grad = (softmax(top @ w_out.T) - y) @ w_out
    return grad.reshape(state.top.shape)


def loss_grad_readout(
    state: NetworkState, y: np.ndarray, params: Parameters, config: ArchitectureConfig
) -> np.ndarray:
    """∂ℓ/∂w_out，对批取平均"""
    top = _as_rows(state.top)
    _check_target(y, top.shape[0], config.num_classes)
    probs = softmax(top @ params.readout.T)
    return (probs - y).T @ top / top.shape[0]


def predict(state: NetworkState, params: Parameters, config: ArchitectureConfig) -> np.ndarray:
    """预测类别"""
    top = _as_rows(state.top)
    if config.loss is LossHead.SQUARED_ERROR:
        return np.argmax(top, axis=1)
    return np.argmax(top @ params.readout.T, axis=1)
