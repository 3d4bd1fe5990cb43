"""
decoder - progressive refinement from stride 32 to a full-size prediction.

The running state starts as the projected n5 map. Each of the three stages
doubles the resolution, adds a projected pyramid skip when the pyramid has
a level at that stride, lets the state attend to the fused frequency-spatial
map (ISEB, or a plain sum when ISEB is off) and applies 3x3 conv + relu.
A 1x1 head and a sigmoid give the probability map, resized to image size.
"""

from typing import Dict, Optional, Tuple

from semantic.bin import RefinedPyramid
from structure.iseb import iseb_forward
from tensor.layers import conv, linear_project
from tensor.ops import lift, relu, reshape, resample, resize, sigmoid
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

DECODER_WIDTH = 32
STAGES = 3
OUTPUT_SCALE = 4


def decoder_forward(f_fs: Operand, pyramid: RefinedPyramid, params: ParamScope,
                    use_iseb: bool = True, out_size: Optional[Tuple[int, int]] = None,
                    trace: Optional[Dict[str, Tensor]] = None) -> Tensor:
    """
    Returns the (H, W) prediction in (0, 1).

    Args:
        out_size: output grid; defaults to OUTPUT_SCALE times the last stage.
        trace: when given, receives 'decoder.stage<k>' and 'decoder.logits'.
    """
    f_fs = lift(f_fs)
    state = linear_project(pyramid.n5, params, "entry", DECODER_WIDTH)
    skips = {pyramid.n4.shape[1:]: ("skip_n4", pyramid.n4),
             pyramid.p3.shape[1:]: ("skip_p3", pyramid.p3)}

    for k in range(1, STAGES + 1):
        stage = params.child(f"stage{k}")
        state = resample(state, "up2")
        skip = skips.get(state.shape[1:])
        if skip is not None:
            state = state + linear_project(skip[1], stage, skip[0], DECODER_WIDTH)
        aux = resize(f_fs, state.shape[1:])
        if use_iseb:
            state = iseb_forward(state, aux, stage.child("iseb"))
        else:
            state = state + aux
        state = relu(conv(state, stage, "conv", DECODER_WIDTH))
        if trace is not None:
            trace[f"decoder.stage{k}"] = state

    logits = linear_project(state, params, "head", 1)
    if trace is not None:
        trace["decoder.logits"] = logits
    h, w = state.shape[1:]
    size = tuple(out_size) if out_size is not None else (OUTPUT_SCALE * h, OUTPUT_SCALE * w)
    prediction = resize(sigmoid(logits), size)
    return reshape(prediction, size)
