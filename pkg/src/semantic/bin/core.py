"""
bin - text-gated bidirectional pyramid refinement.

bin_gate turns the text embedding into one sigmoid gate per channel and
scale and multiplies it into the 1x1-projected pyramid levels. bin_flow
then runs a top-down pass (coarse to fine, upsampling) followed by a
bottom-up pass (fine to coarse, downsampling), each step a residual sum
passed through 3x3 conv + relu.
"""

from dataclasses import dataclass
from typing import Tuple, Union

from semantic.encoders import PYRAMID_CHANNELS, FeaturePyramid, TextEmbedding
from tensor.errors import ShapeError
from tensor.layers import conv, linear_project
from tensor.ops import expand, lift, relu, resample, sigmoid, slice_channels
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

Text = Union[TextEmbedding, Operand]


@dataclass(frozen=True, eq=False)
class GateSet:
    t3: Tensor
    t4: Tensor
    t5: Tensor

    def levels(self) -> Tuple[Tensor, Tensor, Tensor]:
        return self.t3, self.t4, self.t5


@dataclass(frozen=True, eq=False)
class GatedPyramid(FeaturePyramid):
    gates: GateSet


@dataclass(frozen=True, eq=False)
class RefinedPyramid:
    p3: Tensor
    n4: Tensor
    n5: Tensor

    def levels(self) -> Tuple[Tensor, Tensor, Tensor]:
        return self.p3, self.n4, self.n5


def text_vector(t: Text) -> Tensor:
    """The raw embedding as a Tensor; plain arrays bypass the unit-norm check."""
    return lift(t.values if isinstance(t, TextEmbedding) else t)


def compute_gates(t: Text, params: ParamScope,
                  channels: Tuple[int, ...] = PYRAMID_CHANNELS) -> GateSet:
    """t_hat = sigmoid(W_g t), split into one gate vector per scale."""
    gates = sigmoid(linear_project(text_vector(t), params, "gate", sum(channels), bias=False))
    bounds = [0]
    for c in channels:
        bounds.append(bounds[-1] + c)
    return GateSet(*(slice_channels(gates, bounds[i], bounds[i + 1]) for i in range(3)))


def bin_gate(pyr: FeaturePyramid, t: Text, params: ParamScope) -> GatedPyramid:
    channels = tuple(v.shape[0] for v in pyr.levels())
    gates = compute_gates(t, params, channels)
    gated = []
    for level, v, gate in zip((3, 4, 5), pyr.levels(), gates.levels()):
        if gate.shape != (v.shape[0],):
            raise ShapeError(f"Gate of shape {gate.shape} does not match level {level} {v.shape}.")
        h, w = v.shape[1:]
        projected = linear_project(v, params, f"level{level}", v.shape[0], bias=False)
        gated.append(projected * expand(gate, h, w))
    return GatedPyramid(gated[0], gated[1], gated[2], gates)


def _fuse(x: Tensor, params: ParamScope, name: str) -> Tensor:
    return relu(conv(x, params, name, x.shape[0]))


def _align(x: Tensor, params: ParamScope, name: str, channels: int) -> Tensor:
    return linear_project(x, params, name, channels, bias=False)


def bin_flow(pyr: FeaturePyramid, params: ParamScope) -> RefinedPyramid:
    v3, v4, v5 = pyr.levels()
    c3, c4, c5 = v3.shape[0], v4.shape[0], v5.shape[0]

    p5 = v5
    p4 = _fuse(v4 + resample(_align(p5, params, "down.align4", c4), "up2"), params, "down.fuse4")
    p3 = _fuse(v3 + resample(_align(p4, params, "down.align3", c3), "up2"), params, "down.fuse3")

    n3 = p3
    n4 = _fuse(p4 + resample(_align(n3, params, "up.align4", c4), "down2"), params, "up.fuse4")
    n5 = _fuse(p5 + resample(_align(n4, params, "up.align5", c5), "down2"), params, "up.fuse5")
    return RefinedPyramid(p3, n4, n5)
