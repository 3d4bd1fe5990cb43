from .core import (
    DEFAULT_LAMBDA,
    LossReport,
    boundary_weights,
    composite_loss,
    cosine_loss,
    visual_operand,
    weighted_bce,
    weighted_iou,
)

__all__ = [
    "DEFAULT_LAMBDA", "LossReport", "boundary_weights", "composite_loss",
    "cosine_loss", "visual_operand", "weighted_bce", "weighted_iou",
]
