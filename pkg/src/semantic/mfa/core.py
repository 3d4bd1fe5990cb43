"""
mfa - multi-scale feature alignment.

Each level is projected to a common width, resized bilinearly to the
finest level's grid, concatenated and projected back to that width.
"""

from typing import Sequence

from tensor.errors import ShapeError
from tensor.layers import linear_project
from tensor.ops import add, concat_channels, lift, resize
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

MFA_WIDTH = 32


def align_levels(levels: Sequence[Operand], params: ParamScope,
                 width: int = MFA_WIDTH) -> list:
    """Project every level to `width` channels on the first level's grid."""
    levels = [lift(x) for x in levels]
    if not levels:
        raise ShapeError("MFA needs at least one input level.")
    target = levels[0].shape[1:]
    return [resize(linear_project(x, params, f"align{i}", width), target)
            for i, x in enumerate(levels)]


def mfa_forward(f3: Operand, f4: Operand, f5: Operand, params: ParamScope,
                width: int = MFA_WIDTH) -> Tensor:
    aligned = align_levels((f3, f4, f5), params, width)
    return linear_project(concat_channels(aligned), params, "fuse", width)


def baseline_fuse(f3: Operand, f4: Operand, f5: Operand, params: ParamScope,
                  width: int = MFA_WIDTH) -> Tensor:
    """Stand-in when MFA is disabled: the aligned levels are summed."""
    aligned = align_levels((f3, f4, f5), params, width)
    out = aligned[0]
    for x in aligned[1:]:
        out = add(out, x)
    return out
