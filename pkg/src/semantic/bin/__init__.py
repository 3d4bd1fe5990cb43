from .core import (
    GatedPyramid,
    GateSet,
    RefinedPyramid,
    Text,
    bin_flow,
    bin_gate,
    compute_gates,
    text_vector,
)

__all__ = [
    "GatedPyramid", "GateSet", "RefinedPyramid", "Text", "bin_flow", "bin_gate",
    "compute_gates", "text_vector",
]
