"""
bands - radial frequency bands and the Multi-Band Fourier Module.

A BandSpec splits the centered normalized radius r in [0, 1] into
half-open intervals [e_{i-1}, e_i), the last one closed at 1. The masks
depend on r only, so they are radially symmetric and keep every masked
spectrum Hermitian.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from spectral.fft import fft2d, ifft2d, spectral_filter
from tensor.errors import ConfigError
from tensor.layers import linear_project
from tensor.ops import emit, lift
from tensor.ops.core import Operand
from tensor.tape import ParamScope, Tensor

DEFAULT_EDGES = (1.0 / 3.0, 2.0 / 3.0)


@dataclass(frozen=True)
class BandSpec:
    """Interior band edges, strictly ascending in (0, 1); band_count = len(edges) + 1."""
    edges: Tuple[float, ...] = DEFAULT_EDGES

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        for e in edges:
            if not 0.0 < e < 1.0:
                raise ConfigError(f"Band edge {e} is outside (0, 1).")
        for lo, hi in zip(edges, edges[1:]):
            if not lo < hi:
                raise ConfigError(f"Band edges must be strictly ascending, got {list(edges)}.")

    @property
    def band_count(self) -> int:
        return len(self.edges) + 1

    @property
    def bounds(self) -> Tuple[float, ...]:
        return (0.0,) + self.edges + (1.0,)

    @classmethod
    def equal_width(cls, band_count: int) -> "BandSpec":
        if band_count < 1:
            raise ConfigError(f"band_count must be positive, got {band_count}.")
        return cls(tuple(k / band_count for k in range(1, band_count)))

    @classmethod
    def parse(cls, text: str) -> "BandSpec":
        """Parse '0.25,0.5,0.75' (an empty string means a single band)."""
        try:
            return cls(tuple(float(p) for p in text.split(',') if p.strip()))
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            raise ConfigError(f"Invalid band edges: {text!r}") from e


def normalized_radius(h: int, w: int) -> np.ndarray:
    """r(u, v) = sqrt((2u'/H)^2 + (2v'/W)^2) / sqrt(2) with signed frequencies u', v'."""
    u = np.fft.fftfreq(h) * 2.0
    v = np.fft.fftfreq(w) * 2.0
    return np.sqrt(u[:, None] ** 2 + v[None, :] ** 2) / np.sqrt(2.0)


@lru_cache(maxsize=32)
def _masks(edges: Tuple[float, ...], h: int, w: int) -> Tuple[np.ndarray, ...]:
    r = normalized_radius(h, w)
    bounds = (0.0,) + edges + (1.0,)
    masks = []
    for i in range(len(bounds) - 1):
        inside = r >= bounds[i]
        if i < len(bounds) - 2:
            inside &= r < bounds[i + 1]
        mask = inside.astype(np.float64)
        mask.setflags(write=False)
        masks.append(mask)
    return tuple(masks)


def make_band_masks(spec: BandSpec, h: int, w: int) -> List[np.ndarray]:
    return list(_masks(spec.edges, h, w))


def band_decompose(x: Operand, spec: BandSpec) -> Tensor:
    """
    Split a (C, H, W) map into B band-limited copies, concatenated band-major.

    Each band keeps the masked magnitude and the full, shared phase before
    the inverse transform. The map is linear and each band operator is
    self-adjoint, so the backward pass filters the gradient with the same masks.
    """
    x = lift(x)
    c, h, w = x.shape
    masks = make_band_masks(spec, h, w)
    rep = fft2d(x.data)
    out = np.concatenate([ifft2d(rep.masked(m)) for m in masks], axis=0)

    def vjp(g):
        gx = np.zeros((c, h, w))
        for i, m in enumerate(masks):
            gx += spectral_filter(g[i * c:(i + 1) * c], m)
        return (gx,)
    return emit("band_decompose", (x,), out, vjp)


def mbfm_forward(x: Operand, spec: BandSpec, params: ParamScope) -> Tensor:
    """F_freq = proj([X_0 || ... || X_{B-1}]) + x, same shape as x."""
    x = lift(x)
    bands = band_decompose(x, spec)
    return linear_project(bands, params, "proj", x.shape[0]) + x


def band_energies(x: np.ndarray, spec: BandSpec) -> np.ndarray:
    """Spectral energy sum(M^2) per band of a single (H, W) grid."""
    rep = fft2d(x)
    return np.array([float((rep.magnitude ** 2 * m).sum())
                     for m in make_band_masks(spec, *x.shape[-2:])])


def split_bands(x: np.ndarray, spec: BandSpec) -> Sequence[np.ndarray]:
    """Plain-array band decomposition: one real grid per band."""
    rep = fft2d(x)
    return [ifft2d(rep.masked(m)) for m in make_band_masks(spec, *x.shape[-2:])]
