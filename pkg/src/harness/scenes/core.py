"""
scenes - seeded synthetic camouflage scenes.

Background and object share one white-noise realisation per scene and are
band-passed on the normalized radial frequency axis; the object's pass band
is shifted up by `texture_freq_offset`, so an offset of 0 makes the two
textures identical. The object is composited under a smooth-edged shape
and the binary mask is that shape thresholded at 0.5.
"""

import hashlib
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np
from scipy.special import expit

from semantic.encoders import render_prompt
from spectral.bands import normalized_radius
from spectral.fft import is_power_of_two, spectral_filter
from tensor.errors import ConfigError
from tensor.tape import named_generator

CLASS_NAMES = ("cat", "owl", "frog", "moth", "fish", "lizard", "crab", "spider")
SHAPES = ("blob", "ring", "elongated")
BASE_BAND = (0.04, 0.22)
EDGE_SOFTNESS = 0.75
CHANNELS = 3


@dataclass(frozen=True)
class SceneSpec:
    seed: int
    size: int = 64
    class_name: str = "cat"
    texture_freq_offset: float = 0.2
    object_shape: str = "blob"
    template: str = "blend-class"

    def __post_init__(self):
        if self.size < 64 or not is_power_of_two(self.size):
            raise ConfigError(f"Scene size must be a power of two >= 64, got {self.size}.")
        if self.class_name not in CLASS_NAMES:
            raise ConfigError(
                f"Unknown class '{self.class_name}'; expected one of {', '.join(CLASS_NAMES)}."
            )
        if self.object_shape not in SHAPES:
            raise ConfigError(f"Unknown object shape '{self.object_shape}'.")
        if not 0.0 <= self.texture_freq_offset < 1.0:
            raise ConfigError(f"texture_freq_offset must lie in [0, 1), got {self.texture_freq_offset}.")


class Scene(NamedTuple):
    image: np.ndarray
    mask: np.ndarray
    prompt: str


def _band_mask(size: int, lo: float, hi: float) -> np.ndarray:
    r = normalized_radius(size, size)
    return ((r >= lo) & (r < hi)).astype(np.float64)


def _standardize(x: np.ndarray) -> np.ndarray:
    centred = x - x.mean(axis=(-2, -1), keepdims=True)
    scale = centred.std(axis=(-2, -1), keepdims=True)
    return centred / np.where(scale > 0, scale, 1.0)


def render_textures(spec: SceneSpec) -> Tuple[np.ndarray, np.ndarray]:
    """(background, object) textures, each (3, size, size) with values in [0, 1]."""
    noise = named_generator(spec.seed, "scene.noise").standard_normal((CHANNELS, spec.size, spec.size))
    lo, hi = BASE_BAND
    shift = spec.texture_freq_offset
    textures = []
    for band in ((lo, hi), (min(lo + shift, 1.0), min(hi + shift, 1.0 + 1e-9))):
        filtered = spectral_filter(noise, _band_mask(spec.size, *band))
        textures.append(np.clip(0.5 + 0.15 * _standardize(filtered), 0.0, 1.0))
    return textures[0], textures[1]


def _shape_field(spec: SceneSpec) -> np.ndarray:
    """Signed distance-like field in pixels, negative inside the object."""
    rng = named_generator(spec.seed, "scene.shape")
    n = spec.size
    cy, cx = n / 2 + rng.uniform(-0.1, 0.1, size=2) * n
    yy, xx = np.mgrid[0:n, 0:n] + 0.5
    dy, dx = yy - cy, xx - cx
    dist = np.hypot(dy, dx)
    theta = np.arctan2(dy, dx)

    if spec.object_shape == "blob":
        r0 = rng.uniform(0.18, 0.28) * n
        radius = np.ones_like(theta)
        for k in (2, 3, 4):
            radius += rng.uniform(-0.05, 0.05) * np.cos(k * theta + rng.uniform(0, 2 * np.pi))
        return dist - r0 * radius
    if spec.object_shape == "ring":
        outer = rng.uniform(0.25, 0.32) * n
        inner = rng.uniform(0.45, 0.6) * outer
        return np.maximum(dist - outer, inner - dist)
    a = rng.uniform(0.3, 0.42) * n
    b = rng.uniform(0.08, 0.14) * n
    angle = rng.uniform(0, np.pi)
    u = dx * np.cos(angle) + dy * np.sin(angle)
    v = -dx * np.sin(angle) + dy * np.cos(angle)
    return (np.sqrt((u / a) ** 2 + (v / b) ** 2) - 1.0) * b


def shape_alpha(spec: SceneSpec) -> np.ndarray:
    return expit(-_shape_field(spec) / EDGE_SOFTNESS)


def generate_scene(spec: SceneSpec) -> Scene:
    background, obj = render_textures(spec)
    alpha = shape_alpha(spec)
    image = alpha * obj + (1.0 - alpha) * background
    mask = (alpha >= 0.5).astype(np.float64)
    return Scene(image, mask, render_prompt(spec.template, spec.class_name))


def make_dataset(count: int, seed: int = 0, size: int = 64, texture_freq_offset: float = 0.2,
                 template: str = "blend-class") -> List[SceneSpec]:
    """`count` specs cycling through the class and shape taxonomies."""
    return [
        SceneSpec(
            seed=seed * 100003 + i,
            size=size,
            class_name=CLASS_NAMES[i % len(CLASS_NAMES)],
            texture_freq_offset=texture_freq_offset,
            object_shape=SHAPES[i % len(SHAPES)],
            template=template,
        )
        for i in range(count)
    ]


def scene_digest(scene: Scene) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(scene.image).tobytes())
    h.update(np.ascontiguousarray(scene.mask).tobytes())
    h.update(scene.prompt.encode("utf-8"))
    return h.hexdigest()
