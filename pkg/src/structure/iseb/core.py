"""
iseb - single-head scaled dot-product attention from a main map onto an
auxiliary map, fused back into the main map through a residual sum.
"""

from typing import Tuple

import numpy as np

from tensor.errors import ShapeError
from tensor.layers import linear_project
from tensor.ops import from_tokens, lift, matmul, resize, softmax, to_tokens, transpose
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor


def attend(main: Operand, aux: Operand, params: ParamScope) -> Tuple[Tensor, Tensor]:
    """
    Returns (attention, attended) where attention is (HW_main, HW_aux) with
    rows summing to 1 and attended is the (HW_main, C) token matrix.
    """
    main, aux = lift(main), lift(aux)
    if main.ndim != 3 or aux.ndim != 3:
        raise ShapeError(f"ISEB needs (C, H, W) maps, got {main.shape} and {aux.shape}.")
    c, h, w = main.shape
    if aux.shape[0] != c:
        raise ShapeError(f"ISEB aux has {aux.shape[0]} channels, main has {c}.")
    aux = resize(aux, (h, w))
    q = to_tokens(linear_project(main, params, "query", c, bias=False))
    k = to_tokens(linear_project(aux, params, "key", c, bias=False))
    v = to_tokens(linear_project(aux, params, "value", c, bias=False))
    attention = softmax(matmul(q, transpose(k, (1, 0))) * (1.0 / np.sqrt(c)), axis=1)
    return attention, matmul(attention, v)


def iseb_forward(main: Operand, aux: Operand, params: ParamScope) -> Tensor:
    main = lift(main)
    _, h, w = main.shape
    _, attended = attend(main, aux, params)
    return main + from_tokens(attended, h, w)
