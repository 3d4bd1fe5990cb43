from .core import (
    CLASS_NAMES,
    SHAPES,
    Scene,
    SceneSpec,
    generate_scene,
    make_dataset,
    render_textures,
    scene_digest,
    shape_alpha,
)

__all__ = [
    "CLASS_NAMES", "SHAPES", "Scene", "SceneSpec", "generate_scene", "make_dataset",
    "render_textures", "scene_digest", "shape_alpha",
]
