from .core import (
    GradCheckReport,
    GradSample,
    LossFn,
    analytic_gradients,
    check_gradients,
    numerical_gradient,
    relative_error,
)

__all__ = [
    "GradCheckReport",
    "GradSample",
    "LossFn",
    "analytic_gradients",
    "check_gradients",
    "numerical_gradient",
    "relative_error",
]
