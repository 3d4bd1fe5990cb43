"""
bca - bidirectional cross-attention between the scale-3 map and the text token.

Text to visual: every visual position queries the single text key. With one
key a softmax is identically 1, so the query/key affinity is squashed by a
sigmoid instead and gates the projected text value per position.

Visual to text: the text query attends over all H*W visual keys and reads
one softmax-weighted average of the visual values.

The two directions are mixed as alpha * X_t + beta * Expand(T_x).
"""

from dataclasses import dataclass

import numpy as np

from semantic.bin import Text, text_vector
from tensor.errors import ShapeError
from tensor.layers import linear_project, scalar
from tensor.ops import expand, lift, matmul, project, reshape, sigmoid, softmax, to_tokens, transpose
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

ALPHA_INIT = 0.5
BETA_INIT = 0.5


@dataclass(frozen=True, eq=False)
class CrossAttention:
    """Both directions plus the mixed output, kept for dumps and tests."""
    text_to_visual: Tensor
    visual_to_text: Tensor
    weights: Tensor
    output: Tensor


def _check(x: Tensor, t: Tensor) -> None:
    if x.ndim != 3:
        raise ShapeError(f"BCA needs a (C, H, W) map, got shape {x.shape}.")
    if t.ndim != 1:
        raise ShapeError(f"BCA needs a text vector, got shape {t.shape}.")


def text_to_visual(x: Operand, t: Text, params: ParamScope) -> Tensor:
    x, t = lift(x), text_vector(t)
    _check(x, t)
    c, h, w = x.shape
    query = linear_project(x, params, "query", c, bias=False)
    key = linear_project(t, params, "key", c, bias=False)
    value = linear_project(t, params, "value", c, bias=False)
    gate = sigmoid(project(query, reshape(key, (1, c))) * (1.0 / np.sqrt(c)))
    return x + gate * expand(value, h, w)


def visual_to_text(x: Operand, t: Text, params: ParamScope):
    """Returns (T_x, attention weights over the H*W positions)."""
    x, t = lift(x), text_vector(t)
    _check(x, t)
    c, h, w = x.shape
    query = linear_project(t, params, "query", c, bias=False)
    keys = linear_project(x, params, "key", c, bias=False)
    values = linear_project(x, params, "value", c, bias=False)
    scores = project(keys, reshape(query, (1, c))) * (1.0 / np.sqrt(c))
    weights = softmax(reshape(scores, (h * w,)), axis=0)
    pooled = matmul(transpose(to_tokens(values), (1, 0)), weights)
    return linear_project(pooled, params, "out", c), weights


def bca_attend(x: Operand, t: Text, params: ParamScope) -> CrossAttention:
    x = lift(x)
    h, w = x.shape[1:]
    x_t = text_to_visual(x, t, params.child("t2v"))
    t_x, weights = visual_to_text(x, t, params.child("v2t"))
    alpha = scalar(params, "alpha", ALPHA_INIT)
    beta = scalar(params, "beta", BETA_INIT)
    output = alpha * x_t + beta * expand(t_x, h, w)
    return CrossAttention(x_t, t_x, weights, output)


def bca_forward(x: Operand, t: Text, params: ParamScope) -> Tensor:
    return bca_attend(x, t, params).output
