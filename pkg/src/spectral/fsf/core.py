"""
fsf - Frequency-Spatial Fusion.

The spatial feature is reweighted per channel (squeeze-excitation gate on
its global average), the frequency feature is reweighted per position
(7x7 conv over its channel mean and max maps), and the two results are
concatenated and projected back to C channels.
"""

from tensor.errors import ShapeError
from tensor.layers import conv, linear_project
from tensor.ops import (concat_channels, expand, lift, mul, pool, reduce_channels, relu,
                        sigmoid)
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

REDUCTION = 4
SPATIAL_KERNEL = 7


def channel_gate(f_spa: Operand, params: ParamScope) -> Tensor:
    """sigma(W_c2 relu(W_c1 GAP(f_spa))), one value per channel."""
    f_spa = lift(f_spa)
    c = f_spa.shape[0]
    hidden = relu(linear_project(pool(f_spa, "gap"), params, "squeeze", max(c // REDUCTION, 1)))
    return sigmoid(linear_project(hidden, params, "excite", c))


def spatial_gate(f_freq: Operand, params: ParamScope) -> Tensor:
    """sigma(conv7x7([mean_c || max_c])), one value per position, shape (1, H, W)."""
    f_freq = lift(f_freq)
    stats = concat_channels([reduce_channels(f_freq, "mean"), reduce_channels(f_freq, "max")])
    return sigmoid(conv(stats, params, "spatial", 1, kernel=SPATIAL_KERNEL))


def fsf_forward(f_spa: Operand, f_freq: Operand, params: ParamScope) -> Tensor:
    f_spa, f_freq = lift(f_spa), lift(f_freq)
    if f_spa.shape != f_freq.shape:
        raise ShapeError(f"FSF inputs differ in shape: {f_spa.shape} vs {f_freq.shape}.")
    c, h, w = f_spa.shape
    f_c = mul(f_spa, expand(channel_gate(f_spa, params.child("channel")), h, w))
    f_s = mul(f_freq, spatial_gate(f_freq, params.child("spatial")))
    return linear_project(concat_channels([f_c, f_s]), params, "merge", c)
