from .core import (
    DEFAULT_EDGES,
    BandSpec,
    band_decompose,
    band_energies,
    make_band_masks,
    mbfm_forward,
    normalized_radius,
    split_bands,
)

__all__ = [
    "DEFAULT_EDGES", "BandSpec", "band_decompose", "band_energies",
    "make_band_masks", "mbfm_forward", "normalized_radius", "split_bands",
]
