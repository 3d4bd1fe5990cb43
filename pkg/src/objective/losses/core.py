"""
losses - the composite training objective.

    total = L_wbce + L_wiou + lam * L_cos

Both segmentation terms share the boundary-emphasis weight map
w = 1 + 5 * |mean15(gt) - gt|, where mean15 is a 15x15 box filter with
edge replication.
"""

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy.ndimage import uniform_filter

from semantic.encoders import TEXT_DIM, TextEmbedding
from tensor.errors import AlignmentError, ShapeError
from tensor.layers import linear_project
from tensor.ops import clip, div, lift, log, mul, pool, sqrt
from tensor.ops import sum as total_sum
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

DEFAULT_LAMBDA = 0.1
BCE_EPS = 1e-7
WEIGHT_WINDOW = 15
WEIGHT_GAIN = 5.0


@dataclass(frozen=True)
class LossReport:
    l_wbce: float
    l_wiou: float
    l_cos: float
    lam: float
    total: float
    node: Optional[Tensor] = field(default=None, compare=False, repr=False)

    def as_row(self) -> dict:
        return {"l_wbce": self.l_wbce, "l_wiou": self.l_wiou,
                "l_cos": self.l_cos, "total": self.total}


def _pair(pred: Operand, gt) -> tuple:
    pred = lift(pred)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ShapeError(f"Prediction {pred.shape} and mask {gt.shape} differ in shape.")
    return pred, gt


def boundary_weights(gt: np.ndarray) -> np.ndarray:
    gt = np.asarray(gt, dtype=np.float64)
    local = uniform_filter(gt, size=WEIGHT_WINDOW, mode="nearest")
    return 1.0 + WEIGHT_GAIN * np.abs(local - gt)


def weighted_bce(pred: Operand, gt) -> Tensor:
    pred, gt = _pair(pred, gt)
    w = boundary_weights(gt)
    p = clip(pred, BCE_EPS, 1.0 - BCE_EPS)
    bce = -(gt * log(p) + (1.0 - gt) * log(1.0 - p))
    return total_sum(mul(w, bce)) * (1.0 / w.sum())


def weighted_iou(pred: Operand, gt) -> Tensor:
    pred, gt = _pair(pred, gt)
    w = boundary_weights(gt)
    inter = total_sum(mul(w * gt, pred))
    union = total_sum(mul(w, pred + gt - pred * gt))
    return 1.0 - div(inter + 1.0, union + 1.0)


def cosine_loss(t: Union[TextEmbedding, Operand], visual: Operand) -> Tensor:
    """1 - cos(t, visual), in [0, 2]."""
    t = lift(t.values if isinstance(t, TextEmbedding) else t)
    visual = lift(visual)
    if t.shape != visual.shape:
        raise ShapeError(f"Cannot align vectors of shape {t.shape} and {visual.shape}.")
    if not np.any(t.data) or not np.any(visual.data):
        raise AlignmentError("Cosine alignment is undefined for a zero vector.")
    dot = total_sum(mul(t, visual))
    norms = sqrt(total_sum(mul(t, t))) * sqrt(total_sum(mul(visual, visual)))
    return 1.0 - div(dot, norms)


def visual_operand(f_mfa: Operand, params: ParamScope, dim: int = TEXT_DIM) -> Tensor:
    """GAP of the MFA map projected to the text width."""
    return pool(linear_project(f_mfa, params, "align", dim), "gap")


def composite_loss(pred: Operand, gt, t: Union[TextEmbedding, Operand], visual: Operand,
                   lam: float = DEFAULT_LAMBDA) -> LossReport:
    l_wbce = weighted_bce(pred, gt)
    l_wiou = weighted_iou(pred, gt)
    l_cos = cosine_loss(t, visual)
    node = (l_wbce + l_wiou) + lam * l_cos
    return LossReport(
        l_wbce=float(l_wbce.data),
        l_wiou=float(l_wiou.data),
        l_cos=float(l_cos.data),
        lam=float(lam),
        total=float(node.data),
        node=node,
    )
