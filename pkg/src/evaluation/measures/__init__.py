from .core import (
    E_THRESHOLDS,
    MetricsReport,
    e_measure,
    enhanced_alignment,
    evaluate_image,
    gaussian_kernel,
    mae,
    s_measure,
    weighted_f_measure,
)

__all__ = [
    "E_THRESHOLDS", "MetricsReport", "e_measure", "enhanced_alignment",
    "evaluate_image", "gaussian_kernel", "mae", "s_measure", "weighted_f_measure",
]
