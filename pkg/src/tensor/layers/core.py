"""
layers - parameterised building blocks on top of tensor.ops.

Every layer fetches (or lazily creates) its weights through a ParamScope,
so the same call records gradients when the scope carries a tape.
"""

from typing import Optional

from tensor.ops import add_bias, conv2d, project
from tensor.tape import ParamScope, Tensor
from tensor.ops.core import Operand, lift


def linear_project(x: Operand, params: ParamScope, name: str, out_channels: int,
                   bias: bool = True) -> Tensor:
    """
    1x1 channel projection of a FeatureMap (or dense matrix on a Vector).

    Weights live at '<name>.weight' with shape (out_channels, in_channels);
    requesting an existing name with another input width raises ShapeError.
    """
    x = lift(x)
    in_channels = x.shape[0]
    w = params.get(f"{name}.weight", (out_channels, in_channels), "kaiming", in_channels)
    y = project(x, w)
    if bias:
        b = params.get(f"{name}.bias", (out_channels,), "zeros")
        y = add_bias(y, b)
    return y


def conv(x: Operand, params: ParamScope, name: str, out_channels: int, kernel: int = 3,
         stride: int = 1, bias: bool = True) -> Tensor:
    x = lift(x)
    in_channels = x.shape[0]
    fan_in = in_channels * kernel * kernel
    w = params.get(f"{name}.weight", (out_channels, in_channels, kernel, kernel), "kaiming",
                   fan_in)
    b: Optional[Tensor] = None
    if bias:
        b = params.get(f"{name}.bias", (out_channels,), "zeros")
    return conv2d(x, w, b, stride=stride)


def scalar(params: ParamScope, name: str, init: float) -> Tensor:
    """A learnable scalar initialised to a constant."""
    return params.get(name, (), init=float(init))
