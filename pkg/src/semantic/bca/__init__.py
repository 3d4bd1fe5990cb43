from .core import (
    ALPHA_INIT,
    BETA_INIT,
    CrossAttention,
    bca_attend,
    bca_forward,
    text_to_visual,
    visual_to_text,
)

__all__ = [
    "ALPHA_INIT", "BETA_INIT", "CrossAttention", "bca_attend", "bca_forward",
    "text_to_visual", "visual_to_text",
]
