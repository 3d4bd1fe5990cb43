"""
encoders - deterministic stand-ins for the frozen text and vision backbones.

The text stub hashes character trigrams into a signed bag of 64 buckets.
The vision stub is a three-stage strided conv pyramid whose weights are
seeded by name and frozen under the 'encoder' prefix.
"""

import hashlib
import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from tensor.errors import InputError, ShapeError
from tensor.layers import conv
from tensor.ops import lift, relu
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

TEXT_DIM = 64
PYRAMID_CHANNELS = (32, 64, 96)
PYRAMID_STRIDES = (8, 16, 32)
ENCODER_PREFIX = "encoder"

DEFAULT_TEMPLATE = "Camouflaged <class> naturally blending into the surrounding environment."

PROMPT_TEMPLATES = {
    "photo-object": "A photo of camouflaged object.",
    "photo-class": "A photo of camouflaged <class>.",
    "short-object": "Camouflaged object.",
    "short-class": "Camouflaged <class>.",
    "blend-object": "Camouflaged object naturally blending into the surrounding environment.",
    "blend-class": DEFAULT_TEMPLATE,
}

_TOKEN = re.compile(r"\w+")


def render_prompt(template: str, class_name: str) -> str:
    """Resolve a template name (or a literal template) and substitute <class>."""
    template = PROMPT_TEMPLATES.get(template, template)
    return template.replace("<class>", class_name)


@dataclass(frozen=True, eq=False)
class TextEmbedding:
    values: np.ndarray

    def __post_init__(self):
        norm = float(np.linalg.norm(self.values))
        if abs(norm - 1.0) > 1e-9:
            raise InputError(f"Text embedding must be unit length, got norm {norm}.")

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class FeaturePyramid:
    v3: Tensor
    v4: Tensor
    v5: Tensor

    def levels(self) -> Tuple[Tensor, Tensor, Tensor]:
        return self.v3, self.v4, self.v5

    def shapes(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(v.shape for v in self.levels())


def _trigrams(token: str):
    padded = f"<{token}>"
    return [padded[i:i + 3] for i in range(max(len(padded) - 2, 1))]


def hash_tokens(prompt: str, dim: int = TEXT_DIM) -> np.ndarray:
    """Unnormalized signed trigram histogram of a prompt."""
    vector = np.zeros(dim)
    for token in _TOKEN.findall(prompt.lower()):
        for gram in _trigrams(token):
            digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest()
            code = int.from_bytes(digest, "little")
            vector[code % dim] += 1.0 if (code >> 63) & 1 else -1.0
    return vector


def stub_text_encoder(prompt: str, dim: int = TEXT_DIM) -> TextEmbedding:
    if not prompt or not prompt.strip():
        raise InputError("Prompt must be a non-empty string.")
    vector = hash_tokens(prompt, dim)
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise InputError(f"Prompt {prompt!r} has no hashable tokens.")
    return TextEmbedding(vector / norm)


def stub_vision_encoder(image: Operand, params: ParamScope) -> FeaturePyramid:
    """
    (3, H, W) image -> (32, H/8, W/8), (64, H/16, W/16), (96, H/32, W/32).

    Runs without a tape; the encoder weights never receive gradients.
    """
    image = lift(image).detach()
    if image.ndim != 3:
        raise ShapeError(f"Image must be (C, H, W), got shape {image.shape}.")
    h, w = image.shape[1:]
    if h % 32 or w % 32 or h == 0 or w == 0:
        raise ShapeError(f"Image dims must be positive multiples of 32, got {h}x{w}.")
    scope = params.detached().child(ENCODER_PREFIX)
    v3 = relu(conv(image, scope, "stage3", PYRAMID_CHANNELS[0], stride=8))
    v4 = relu(conv(v3, scope, "stage4", PYRAMID_CHANNELS[1], stride=2))
    v5 = relu(conv(v4, scope, "stage5", PYRAMID_CHANNELS[2], stride=2))
    return FeaturePyramid(v3, v4, v5)
