from .core import (
    DEFAULT_TEMPLATE,
    ENCODER_PREFIX,
    PROMPT_TEMPLATES,
    PYRAMID_CHANNELS,
    PYRAMID_STRIDES,
    TEXT_DIM,
    FeaturePyramid,
    TextEmbedding,
    hash_tokens,
    render_prompt,
    stub_text_encoder,
    stub_vision_encoder,
)

__all__ = [
    "DEFAULT_TEMPLATE", "ENCODER_PREFIX", "PROMPT_TEMPLATES", "PYRAMID_CHANNELS",
    "PYRAMID_STRIDES", "TEXT_DIM", "FeaturePyramid", "TextEmbedding", "hash_tokens",
    "render_prompt", "stub_text_encoder", "stub_vision_encoder",
]
