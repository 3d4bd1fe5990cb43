"""
ops - the dense primitives every network module is built from.

Each primitive computes its forward value with numpy and, when any input
lives on a Tape, records a closure computing the vector-Jacobian product.
FeatureMaps are (C, H, W) arrays, Vectors are (D,) arrays.
"""

from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from tensor.errors import ContractError, ShapeError
from tensor.tape import Tape, Tensor

Operand = Union[Tensor, np.ndarray, float]


# --- Recording helpers ---

def lift(x: Operand) -> Tensor:
    """Wrap arrays and scalars as constant Tensors."""
    return x if isinstance(x, Tensor) else Tensor(x)


def _tape_of(inputs: Sequence[Tensor]) -> Optional[Tape]:
    tape = None
    for t in inputs:
        if t.tape is not None:
            if tape is not None and t.tape is not tape:
                raise ContractError("Operands are recorded on different tapes.")
            tape = t.tape
    return tape


def emit(op: str, inputs: Sequence[Tensor], output: np.ndarray, vjp) -> Tensor:
    """Wrap a forward value, recording it when any input is on a tape."""
    tape = _tape_of(inputs)
    if tape is None:
        return Tensor(output)
    return tape.record(op, inputs, output, vjp)


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# --- Elementwise arithmetic ---

def _pair(a: Operand, b: Operand) -> Tuple[Tensor, Tensor]:
    a, b = lift(a), lift(b)
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"Operands of shape {a.shape} and {b.shape} do not broadcast.") from None
    return a, b


def add(a: Operand, b: Operand) -> Tensor:
    a, b = _pair(a, b)
    out = a.data + b.data
    return emit("add", (a, b), out,
                lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)))


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = _pair(a, b)
    out = a.data - b.data
    return emit("sub", (a, b), out,
                lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)))


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = _pair(a, b)
    out = a.data * b.data
    return emit("mul", (a, b), out,
                lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)))


def div(a: Operand, b: Operand) -> Tensor:
    a, b = _pair(a, b)
    out = a.data / b.data

    def vjp(g):
        return (_unbroadcast(g / b.data, a.shape),
                _unbroadcast(-g * a.data / (b.data * b.data), b.shape))
    return emit("div", (a, b), out, vjp)


def neg(a: Operand) -> Tensor:
    a = lift(a)
    return emit("neg", (a,), -a.data, lambda g: (-g,))


def log(a: Operand) -> Tensor:
    a = lift(a)
    return emit("log", (a,), np.log(a.data), lambda g: (g / a.data,))


def sqrt(a: Operand) -> Tensor:
    a = lift(a)
    out = np.sqrt(a.data)
    return emit("sqrt", (a,), out, lambda g: (g * 0.5 / out,))


def clip(a: Operand, low: float, high: float) -> Tensor:
    a = lift(a)
    inside = (a.data >= low) & (a.data <= high)
    return emit("clip", (a,), np.clip(a.data, low, high), lambda g: (g * inside,))


# --- Activations ---

def sigmoid(x: Operand) -> Tensor:
    x = lift(x)
    out = expit(x.data)
    return emit("sigmoid", (x,), out, lambda g: (g * out * (1.0 - out),))


def relu(x: Operand) -> Tensor:
    x = lift(x)
    positive = x.data > 0
    return emit("relu", (x,), np.where(positive, x.data, 0.0), lambda g: (g * positive,))


def softmax(x: Operand, axis: int = -1) -> Tensor:
    x = lift(x)
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def vjp(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)
    return emit("softmax", (x,), out, vjp)


def activation(x: Operand, kind: str, axis: Optional[int] = None) -> Tensor:
    """Dispatch by name: 'sigmoid', 'relu' or 'softmax' (softmax needs an axis)."""
    if kind == "sigmoid":
        return sigmoid(x)
    if kind == "relu":
        return relu(x)
    if kind == "softmax":
        if axis is None:
            raise ContractError("softmax activation requires an axis.")
        return softmax(x, axis)
    raise ContractError(f"Unknown activation: {kind}")


# --- Reductions and reshaping ---

def sum(x: Operand, axis=None) -> Tensor:  # noqa: A001
    x = lift(x)
    out = x.data.sum(axis=axis)

    def vjp(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)
    return emit("sum", (x,), out, vjp)


def mean(x: Operand, axis=None) -> Tensor:
    x = lift(x)
    count = x.size if axis is None else int(np.prod([x.shape[a] for a in np.atleast_1d(axis)]))
    return mul(sum(x, axis), 1.0 / count)


def reshape(x: Operand, shape: Sequence[int]) -> Tensor:
    x = lift(x)
    return emit("reshape", (x,), x.data.reshape(shape), lambda g: (g.reshape(x.shape),))


def transpose(x: Operand, axes: Optional[Sequence[int]] = None) -> Tensor:
    x = lift(x)
    axes = tuple(range(x.ndim))[::-1] if axes is None else tuple(axes)
    inverse = tuple(np.argsort(axes))
    return emit("transpose", (x,), np.transpose(x.data, axes), lambda g: (np.transpose(g, inverse),))


def matmul(a: Operand, b: Operand) -> Tensor:
    """2-D @ 2-D or 2-D @ 1-D product."""
    a, b = lift(a), lift(b)
    if a.ndim != 2 or b.ndim not in (1, 2) or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul cannot combine {a.shape} and {b.shape}.")
    out = a.data @ b.data

    def vjp(g):
        if b.ndim == 1:
            return np.outer(g, b.data), a.data.T @ g
        return g @ b.data.T, a.data.T @ g
    return emit("matmul", (a, b), out, vjp)


def expand(v: Operand, height: int, width: int) -> Tensor:
    """Broadcast a (C,) vector to every spatial position of a (C, H, W) map."""
    v = lift(v)
    if v.ndim != 1:
        raise ShapeError(f"expand needs a vector, got shape {v.shape}.")
    out = np.broadcast_to(v.data[:, None, None], (v.shape[0], height, width)).copy()
    return emit("expand", (v,), out, lambda g: (g.sum(axis=(1, 2)),))


def to_tokens(x: Operand) -> Tensor:
    """(C, H, W) -> (H*W, C), one row per spatial position."""
    x = lift(x)
    c, h, w = x.shape
    return transpose(reshape(x, (c, h * w)), (1, 0))


def from_tokens(tokens: Operand, height: int, width: int) -> Tensor:
    tokens = lift(tokens)
    return reshape(transpose(tokens, (1, 0)), (tokens.shape[1], height, width))


# --- Channel operations ---

def project(x: Operand, w: Operand) -> Tensor:
    """
    1x1 channel projection y[o,h,w] = sum_c W[o,c] x[c,h,w], or W @ x for vectors.
    """
    x, w = lift(x), lift(w)
    if w.ndim != 2 or x.ndim not in (1, 3) or w.shape[1] != x.shape[0]:
        raise ShapeError(f"Cannot project input of shape {x.shape} with weight {w.shape}.")
    if x.ndim == 1:
        return matmul(w, x)
    out = np.tensordot(w.data, x.data, axes=([1], [0]))

    def vjp(g):
        return (np.tensordot(w.data, g, axes=([0], [0])),
                np.tensordot(g, x.data, axes=([1, 2], [1, 2])))
    return emit("project", (x, w), out, vjp)


def add_bias(x: Operand, b: Operand) -> Tensor:
    x, b = lift(x), lift(b)
    if b.shape != (x.shape[0],):
        raise ShapeError(f"Bias of shape {b.shape} does not match {x.shape[0]} channels.")
    if x.ndim == 1:
        return add(x, b)
    return add(x, reshape(b, (b.shape[0], 1, 1)))


def concat_channels(xs: Sequence[Operand]) -> Tensor:
    xs = [lift(x) for x in xs]
    if not xs:
        raise ShapeError("concat_channels needs at least one input.")
    spatial = xs[0].shape[1:]
    for x in xs[1:]:
        if x.shape[1:] != spatial:
            raise ShapeError(f"Cannot concatenate spatial dims {x.shape[1:]} with {spatial}.")
    bounds = np.cumsum([0] + [x.shape[0] for x in xs])
    out = np.concatenate([x.data for x in xs], axis=0)

    def vjp(g):
        return tuple(g[bounds[i]:bounds[i + 1]] for i in range(len(xs)))
    return emit("concat", xs, out, vjp)


def slice_channels(x: Operand, start: int, stop: int) -> Tensor:
    x = lift(x)

    def vjp(g):
        full = np.zeros_like(x.data)
        full[start:stop] = g
        return (full,)
    return emit("slice", (x,), x.data[start:stop].copy(), vjp)


def reduce_channels(x: Operand, kind: str) -> Tensor:
    """Channel-wise 'mean' or 'max' of a (C, H, W) map, kept as (1, H, W)."""
    x = lift(x)
    if kind == "mean":
        out = x.data.mean(axis=0, keepdims=True)
        return emit("reduce_mean", (x,), out,
                    lambda g: (np.broadcast_to(g / x.shape[0], x.shape).copy(),))
    if kind == "max":
        arg = x.data.argmax(axis=0)[None]
        out = np.take_along_axis(x.data, arg, axis=0)

        def vjp(g):
            full = np.zeros_like(x.data)
            np.put_along_axis(full, arg, g, axis=0)
            return (full,)
        return emit("reduce_max", (x,), out, vjp)
    raise ContractError(f"Unknown channel reduction: {kind}")


# --- Spatial operations ---

def _pad_edge(a: np.ndarray, p: int) -> np.ndarray:
    if p == 0:
        return a
    return np.pad(a, ((0, 0), (p, p), (p, p)), mode="edge")


def _fold_edge(g: np.ndarray, p: int, h: int, w: int) -> np.ndarray:
    """Adjoint of edge-replication padding: padded gradients land on the border."""
    if p == 0:
        return g
    rows = g[:, p:p + h, :].copy()
    rows[:, 0, :] += g[:, :p, :].sum(axis=1)
    rows[:, -1, :] += g[:, p + h:, :].sum(axis=1)
    out = rows[:, :, p:p + w].copy()
    out[:, :, 0] += rows[:, :, :p].sum(axis=2)
    out[:, :, -1] += rows[:, :, p + w:].sum(axis=2)
    return out


def _scatter_windows(gwin: np.ndarray, padded_shape, k: int, stride: int) -> np.ndarray:
    """Sum window-shaped gradients (C, Ho, Wo, k, k) back onto the padded grid."""
    _, ho, wo = gwin.shape[:3]
    gxp = np.zeros(padded_shape)
    for i in range(k):
        for j in range(k):
            gxp[:, i:i + stride * ho:stride, j:j + stride * wo:stride] += gwin[:, :, :, i, j]
    return gxp


def conv2d(x: Operand, w: Operand, b: Optional[Operand] = None, stride: int = 1) -> Tensor:
    """k x k convolution (cross-correlation) with edge-replication padding k//2."""
    x, w = lift(x), lift(w)
    c, h, wd = x.shape
    o, ci, k, k2 = w.shape
    if ci != c or k != k2 or k % 2 == 0:
        raise ShapeError(f"Kernel {w.shape} does not fit input with {c} channels.")
    p = k // 2
    xp = _pad_edge(x.data, p)
    windows = sliding_window_view(xp, (k, k), axis=(1, 2))[:, ::stride, ::stride]
    out = np.tensordot(w.data, windows, axes=([1, 2, 3], [0, 3, 4]))

    def vjp(g):
        gw = np.tensordot(g, windows, axes=([1, 2], [1, 2]))
        gwin = np.moveaxis(np.tensordot(w.data, g, axes=([0], [0])), (1, 2), (3, 4))
        gx = _fold_edge(_scatter_windows(gwin, xp.shape, k, stride), p, h, wd)
        return gx, gw

    y = emit("conv2d", (x, w), out, vjp)
    if b is not None:
        y = add_bias(y, b)
    return y


def pool(x: Operand, kind: str) -> Tensor:
    """
    'gap' -> per-channel mean as a Vector; 'avg-k' / 'max-k' -> k x k windows,
    stride 1, same-size output through edge replication (k odd).
    """
    x = lift(x)
    if x.size == 0:
        raise ShapeError("Cannot pool an empty input.")
    c, h, w = x.shape
    if kind == "gap":
        out = x.data.mean(axis=(1, 2))
        return emit("gap", (x,), out,
                    lambda g: (np.broadcast_to(g[:, None, None] / (h * w), x.shape).copy(),))

    name, _, size = kind.partition("-")
    if name not in ("avg", "max") or not size.isdigit():
        raise ContractError(f"Unknown pooling kind: {kind}")
    k = int(size)
    if k % 2 == 0 or k > min(h, w):
        raise ShapeError(f"Pooling window {k} must be odd and fit {h}x{w}.")
    p = k // 2
    xp = _pad_edge(x.data, p)
    windows = sliding_window_view(xp, (k, k), axis=(1, 2))

    if name == "avg":
        out = windows.mean(axis=(3, 4))

        def vjp(g):
            gwin = np.broadcast_to(g[..., None, None] / (k * k), g.shape + (k, k))
            return (_fold_edge(_scatter_windows(gwin, xp.shape, k, 1), p, h, w),)
        return emit("avg_pool", (x,), out, vjp)

    flat = windows.reshape(c, h, w, k * k)
    arg = flat.argmax(axis=-1)
    out = np.take_along_axis(flat, arg[..., None], axis=-1)[..., 0]

    def vjp_max(g):
        gxp = np.zeros(xp.shape)
        di, dj = np.divmod(arg, k)
        cc, hh, ww = np.indices((c, h, w))
        np.add.at(gxp, (cc, hh + di, ww + dj), g)
        return (_fold_edge(gxp, p, h, w),)
    return emit("max_pool", (x,), out, vjp_max)


@lru_cache(maxsize=64)
def interpolation_matrix(n_out: int, n_in: int) -> np.ndarray:
    """Half-pixel (align_corners=False) linear interpolation weights, rows sum to 1."""
    a = np.zeros((n_out, n_in))
    scale = n_in / n_out
    for i in range(n_out):
        src = max((i + 0.5) * scale - 0.5, 0.0)
        i0 = min(int(np.floor(src)), n_in - 1)
        i1 = min(i0 + 1, n_in - 1)
        frac = src - i0
        a[i, i0] += 1.0 - frac
        a[i, i1] += frac
    a.setflags(write=False)
    return a


@lru_cache(maxsize=64)
def _halving_matrix(n: int) -> np.ndarray:
    a = np.zeros((n // 2, n))
    rows = np.arange(n // 2)
    a[rows, 2 * rows] = 0.5
    a[rows, 2 * rows + 1] = 0.5
    a.setflags(write=False)
    return a


def _separable(x: Tensor, a_h: np.ndarray, a_w: np.ndarray, op: str) -> Tensor:
    out = np.matmul(np.matmul(a_h, x.data), a_w.T)
    return emit(op, (x,), out, lambda g: (np.matmul(np.matmul(a_h.T, g), a_w),))


def resize(x: Operand, size: Tuple[int, int]) -> Tensor:
    """Bilinear resize of a (C, H, W) map to `size`."""
    x = lift(x)
    h, w = x.shape[1:]
    if (h, w) == tuple(size):
        return x
    return _separable(x, interpolation_matrix(size[0], h), interpolation_matrix(size[1], w), "resize")


def resample(x: Operand, mode: str) -> Tensor:
    """'up2': bilinear x2. 'down2': 2x2 average pooling, stride 2 (even dims only)."""
    x = lift(x)
    h, w = x.shape[1:]
    if mode == "up2":
        return resize(x, (2 * h, 2 * w))
    if mode == "down2":
        if h % 2 or w % 2:
            raise ShapeError(f"down2 needs even spatial dims, got {h}x{w}.")
        return _separable(x, _halving_matrix(h), _halving_matrix(w), "down2")
    raise ContractError(f"Unknown resample mode: {mode}")


def pad_zeros(x: Operand, height: int, width: int) -> Tensor:
    """Zero-pad a (C, H, W) map at the bottom/right to (height, width)."""
    x = lift(x)
    c, h, w = x.shape
    if (h, w) == (height, width):
        return x
    out = np.zeros((c, height, width))
    out[:, :h, :w] = x.data
    return emit("pad", (x,), out, lambda g: (g[:, :h, :w].copy(),))


def crop(x: Operand, height: int, width: int) -> Tensor:
    x = lift(x)
    if x.shape[1:] == (height, width):
        return x

    def vjp(g):
        full = np.zeros_like(x.data)
        full[:, :height, :width] = g
        return (full,)
    return emit("crop", (x,), x.data[:, :height, :width].copy(), vjp)
