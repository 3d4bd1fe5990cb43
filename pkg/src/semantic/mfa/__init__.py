from .core import MFA_WIDTH, align_levels, baseline_fuse, mfa_forward

__all__ = ["MFA_WIDTH", "align_levels", "baseline_fuse", "mfa_forward"]
