from .core import Record, Tape, Tensor, backward
from .params import ParamScope, ParamStore, named_generator

__all__ = [
    "ParamScope",
    "ParamStore",
    "Record",
    "Tape",
    "Tensor",
    "backward",
    "named_generator",
]
