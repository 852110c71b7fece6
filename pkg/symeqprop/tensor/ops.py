"""
张量算子 - 卷积、转置卷积、带索引的最大池化、反池化、展平与广义点积

所有算子既接受单个样本 (C, H, W)，也接受带前导批维度的 (N, C, H, W)；
批内样本互不影响。卷积步长固定为 1。
"""
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import NonFiniteError, ShapeError

Tensor = np.ndarray


@dataclass(frozen=True)
class PoolIndices:
    """
    最大池化的相对位置索引

    offsets 与池化输出同形，存放窗口内按行优先展开的偏移 i*·F + j*。
    """

    offsets: np.ndarray
    size: int

    @property
    def rows(self) -> np.ndarray:
        return self.offsets // self.size

    @property
    def cols(self) -> np.ndarray:
        return self.offsets % self.size

    @property
    def shape(self) -> tuple[int, ...]:
        return self.offsets.shape


def check_finite(x: np.ndarray, name: str = "tensor") -> None:
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"{name} 含有 NaN 或 Inf")


def _batched(x: np.ndarray, name: str) -> tuple[np.ndarray, bool]:
    x = np.asarray(x)
    if x.ndim == 3:
        return x[None], True
    if x.ndim == 4:
        return x, False
    raise ShapeError(f"{name} 应为 (C,H,W) 或 (N,C,H,W)，实际形状 {x.shape}")


def _check_kernel(w: np.ndarray) -> int:
    if w.ndim != 4 or w.shape[2] != w.shape[3]:
        raise ShapeError(f"卷积核应为 (C_out,C_in,F,F)，实际形状 {w.shape}")
    return w.shape[2]


def _check_padding(padding: int) -> None:
    if padding < 0:
        raise ShapeError(f"padding 不能为负: {padding}")


def _windows(x: np.ndarray, size: int, padding: int) -> np.ndarray:
    """(N,C,H,W) -> (N,C,H_out,W_out,F,F) 的滑动窗口视图"""
    if padding:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    if x.shape[2] < size or x.shape[3] < size:
        raise ShapeError(f"补零后的输入 {x.shape[2:]} 小于卷积核 {size}×{size}")
    return sliding_window_view(x, (size, size), axis=(2, 3))


def conv2d(
    w: Tensor, x: Tensor, bias: Tensor | None = None, padding: int = 0
) -> Tensor:
    """y[c,h,w] = B_c + Σ w[c,i,j,k]·x_pad[i, j+h, k+w]"""
    w = np.asarray(w)
    size = _check_kernel(w)
    _check_padding(padding)
    xb, single = _batched(x, "x")
    if xb.shape[1] != w.shape[1]:
        raise ShapeError(f"输入通道不一致: w {w.shape} 与 x {np.shape(x)}")
    check_finite(xb, "x")
    windows = _windows(xb, size, padding)
    out = np.einsum("nihwjk,cijk->nchw", windows, w, optimize=True)
    if bias is not None:
        bias = np.asarray(bias)
        if bias.shape != (w.shape[0],):
            raise ShapeError(f"偏置形状 {bias.shape} 与卷积核 {w.shape} 不一致")
        out = out + bias[None, :, None, None]
    return out[0] if single else out


def conv2d_transpose(w: Tensor, y: Tensor, padding: int = 0) -> Tensor:
    """conv2d（不含偏置）关于输入的伴随算子"""
    w = np.asarray(w)
    size = _check_kernel(w)
    _check_padding(padding)
    yb, single = _batched(y, "y")
    if yb.shape[1] != w.shape[0]:
        raise ShapeError(f"输出通道不一致: w {w.shape} 与 y {np.shape(y)}")
    check_finite(yb, "y")
    n, _, h_out, w_out = yb.shape
    height = h_out + size - 1 - 2 * padding
    width = w_out + size - 1 - 2 * padding
    if height <= 0 or width <= 0:
        raise ShapeError(f"y {np.shape(y)} 与卷积核 {w.shape}、padding {padding} 无法对应任何输入")

    grad = np.zeros((n, w.shape[1], h_out + size - 1, w_out + size - 1), dtype=np.result_type(w, yb))
    for j in range(size):
        for k in range(size):
            grad[:, :, j : j + h_out, k : k + w_out] += np.einsum(
                "nchw,ci->nihw", yb, w[:, :, j, k], optimize=True
            )
    grad = grad[:, :, padding : padding + height, padding : padding + width]
    return grad[0] if single else grad


def conv2d_weight_grad(
    upstream: Tensor, x: Tensor, padding: int, size: int
) -> tuple[Tensor, Tensor]:
    """
    (∂(w⋆x)/∂w)·upstream 与 (∂(w⋆x)/∂B)·upstream

    带批维度时对批内样本求和。
    """
    _check_padding(padding)
    ub, _ = _batched(upstream, "upstream")
    xb, _ = _batched(x, "x")
    if ub.shape[0] != xb.shape[0]:
        raise ShapeError(f"批大小不一致: upstream {np.shape(upstream)} 与 x {np.shape(x)}")
    check_finite(ub, "upstream")
    check_finite(xb, "x")
    windows = _windows(xb, size, padding)
    if windows.shape[2:4] != ub.shape[2:4]:
        raise ShapeError(
            f"upstream {np.shape(upstream)} 与 x {np.shape(x)} 在 F={size}、padding={padding} 下不匹配"
        )
    dw = np.einsum("nchw,nihwjk->cijk", ub, windows, optimize=True)
    db = ub.sum(axis=(0, 2, 3))
    return dw, db


def _blocks(x: np.ndarray, size: int) -> np.ndarray:
    """(N,C,H,W) -> (N,C,H/F,W/F,F·F)，窗口内按行优先排列"""
    n, c, h, w = x.shape
    if size < 1 or h % size or w % size:
        raise ShapeError(f"空间尺寸 {(h, w)} 不能被池化大小 {size} 整除")
    ho, wo = h // size, w // size
    return (
        x.reshape(n, c, ho, size, wo, size)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho, wo, size * size)
    )


def _unblocks(blocks: np.ndarray, size: int) -> np.ndarray:
    n, c, ho, wo, _ = blocks.shape
    return (
        blocks.reshape(n, c, ho, wo, size, size)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, ho * size, wo * size)
    )


def maxpool(x: Tensor, size: int) -> tuple[Tensor, PoolIndices]:
    """步长与窗口均为 F 的最大池化；并列时取行优先扫描的第一个最大值"""
    xb, single = _batched(x, "x")
    check_finite(xb, "x")
    blocks = _blocks(xb, size)
    offsets = np.argmax(blocks, axis=-1)
    values = np.take_along_axis(blocks, offsets[..., None], axis=-1)[..., 0]
    if single:
        return values[0], PoolIndices(offsets[0], size)
    return values, PoolIndices(offsets, size)


def _offsets_for(y: np.ndarray, ind: PoolIndices, single: bool) -> np.ndarray:
    offsets = ind.offsets[None] if single and ind.offsets.ndim == 3 else ind.offsets
    if offsets.shape != y.shape:
        raise ShapeError(f"池化索引形状 {ind.shape} 与张量 {y.shape} 不一致")
    return offsets


def unpool(y: Tensor, ind: PoolIndices, size: int | None = None) -> Tensor:
    """把 y 放回各窗口的最大值位置，其余位置为 0"""
    if size is not None and size != ind.size:
        raise ShapeError(f"池化大小 {size} 与索引记录的 {ind.size} 不一致")
    yb, single = _batched(y, "y")
    offsets = _offsets_for(yb, ind, single)
    blocks = np.zeros(yb.shape + (ind.size * ind.size,), dtype=yb.dtype)
    np.put_along_axis(blocks, offsets[..., None], yb[..., None], axis=-1)
    out = _unblocks(blocks, ind.size)
    return out[0] if single else out


def unpool_transpose(z: Tensor, ind: PoolIndices) -> Tensor:
    """unpool 的伴随：按索引取出每个窗口中对应位置的值"""
    zb, single = _batched(z, "z")
    blocks = _blocks(zb, ind.size)
    offsets = _offsets_for(blocks[..., 0], ind, single)
    values = np.take_along_axis(blocks, offsets[..., None], axis=-1)[..., 0]
    return values[0] if single else values


def flatten(x: Tensor) -> Tensor:
    """(C,H,W) -> (1,CHW)；(N,C,H,W) -> (N,CHW)，行优先"""
    x = np.asarray(x)
    if x.ndim == 3:
        return x.reshape(1, -1)
    if x.ndim < 2:
        raise ShapeError(f"无法展平形状 {x.shape}")
    return x.reshape(x.shape[0], -1)


def unflatten(v: Tensor, shape: tuple[int, int, int]) -> Tensor:
    """(N, CHW) -> (N, C, H, W)"""
    v = np.asarray(v)
    size = int(np.prod(shape))
    if v.ndim != 2 or v.shape[1] != size:
        raise ShapeError(f"向量形状 {v.shape} 无法还原为 {tuple(shape)}")
    return v.reshape((v.shape[0], *shape))


def gdot(a: Tensor, b: Tensor) -> float:
    """Σ a·b，遍历所有元素"""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"gdot 形状不一致: {a.shape} 与 {b.shape}")
    return float(np.sum(a * b))


def batch_gdot(a: Tensor, b: Tensor) -> np.ndarray:
    """逐样本的广义点积，返回 (N,)"""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"batch_gdot 形状不一致: {a.shape} 与 {b.shape}")
    return np.sum((a * b).reshape(a.shape[0], -1), axis=1)
