"""
Exception family shared by every sfgsuite pillar.

Each error carries the process exit code the command-line tools report
when it escapes to the top level.
"""

from typing import Optional


class SFGError(Exception):
    """Base exception for all sfgsuite errors."""
    exit_code = 1


class ShapeError(SFGError, ValueError):
    """Raised when array shapes, channel counts or spatial dims disagree."""
    pass


class ContractError(SFGError, ValueError):
    """Raised when a pre-condition of an operation is violated."""
    pass


class InputError(ContractError):
    """Raised for empty or unusable user input (e.g. an empty prompt)."""
    pass


class AlignmentError(ContractError):
    """Raised when the cosine alignment term receives a zero vector."""
    pass


class SymmetryError(ContractError):
    """Raised when an inverse FFT leaves a non-negligible imaginary part."""
    pass


class ConfigError(SFGError, ValueError):
    """Raised for invalid configuration values or keys."""
    pass


class FormatError(SFGError, ValueError):
    """Raised when a GridFile or PGM cannot be decoded."""
    exit_code = 2

    def __init__(self, message: str, offset: Optional[int] = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DivergenceError(SFGError, RuntimeError):
    """Raised when the toy trainer's loss runs away."""
    exit_code = 3


class CheckFailure(SFGError, AssertionError):
    """Raised when a gradient check does not meet its tolerance."""
    exit_code = 3
