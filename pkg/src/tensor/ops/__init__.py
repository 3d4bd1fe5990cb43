from .core import (
    activation,
    add,
    add_bias,
    clip,
    concat_channels,
    conv2d,
    crop,
    div,
    emit,
    expand,
    from_tokens,
    interpolation_matrix,
    lift,
    log,
    matmul,
    mean,
    mul,
    neg,
    pad_zeros,
    pool,
    project,
    reduce_channels,
    relu,
    resample,
    reshape,
    resize,
    sigmoid,
    slice_channels,
    softmax,
    sqrt,
    sub,
    sum,
    to_tokens,
    transpose,
)

__all__ = [
    "activation", "add", "add_bias", "clip", "concat_channels", "conv2d", "crop",
    "div", "emit", "expand", "from_tokens", "interpolation_matrix", "lift", "log",
    "matmul", "mean", "mul", "neg", "pad_zeros", "pool", "project",
    "reduce_channels", "relu", "resample", "reshape", "resize", "sigmoid",
    "slice_channels", "softmax", "sqrt", "sub", "sum", "to_tokens", "transpose",
]
