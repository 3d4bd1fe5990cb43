"""
fft - radix-2 Cooley-Tukey transforms on power-of-two grids.

Conventions: the forward transform is unnormalized (the DC bin equals
H*W*mean(x)); the inverse applies the 1/(H*W) factor. Inputs of rank 3
are treated as a stack of independent (H, W) channels.
"""

import logging
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import numpy as np

from tensor.errors import ShapeError, SymmetryError

logger = logging.getLogger(__name__)

RESIDUE_DISCARD = 1e-9
RESIDUE_LIMIT = 1e-6


@dataclass(frozen=True)
class SpectralRep:
    """Magnitude (>= 0) and phase (in (-pi, pi]) of a 2-D spectrum."""
    magnitude: np.ndarray
    phase: np.ndarray

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.magnitude.shape

    def complex(self) -> np.ndarray:
        return self.magnitude * np.exp(1j * self.phase)

    def masked(self, mask: np.ndarray) -> "SpectralRep":
        """Zero the magnitude outside `mask`; the phase is shared unchanged."""
        return SpectralRep(self.magnitude * mask, self.phase)

    def is_hermitian(self, tol: float = 1e-9) -> bool:
        z = self.complex()
        mirrored = np.roll(np.flip(z, axis=(-2, -1)), shift=(1, 1), axis=(-2, -1))
        scale = max(float(np.abs(z).max()), 1.0)
        return bool(np.abs(z - np.conj(mirrored)).max() <= tol * scale)


def is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _check_grid(shape: Sequence[int]) -> None:
    h, w = shape[-2], shape[-1]
    if not (is_power_of_two(h) and is_power_of_two(w)):
        raise ShapeError(
            f"FFT needs power-of-two spatial dims, got {h}x{w}; pad with pad_to_pow2 first."
        )


@lru_cache(maxsize=32)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    order = np.zeros(n, dtype=np.intp)
    for i in range(n):
        order[i] = int(format(i, f"0{bits}b")[::-1], 2) if bits else 0
    order.setflags(write=False)
    return order


def fft(a: np.ndarray, axis: int = -1, inverse: bool = False) -> np.ndarray:
    """Unnormalized 1-D DFT along `axis` (sign +1 in the exponent when `inverse`)."""
    z = np.moveaxis(np.asarray(a, dtype=np.complex128), axis, -1)
    n = z.shape[-1]
    if not is_power_of_two(n):
        raise ShapeError(f"FFT length must be a power of two, got {n}.")
    lead = z.shape[:-1]
    z = z[..., _bit_reversal(n)]
    sign = 1.0 if inverse else -1.0
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        blocks = z.reshape(lead + (n // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        z = np.concatenate([even + odd, even - odd], axis=-1).reshape(lead + (n,))
        size *= 2
    return np.moveaxis(z, -1, axis)


def fft2_complex(x: np.ndarray) -> np.ndarray:
    _check_grid(np.shape(x))
    return fft(fft(x, axis=-1), axis=-2)


def ifft2_complex(z: np.ndarray) -> np.ndarray:
    _check_grid(np.shape(z))
    h, w = z.shape[-2], z.shape[-1]
    return fft(fft(z, axis=-1, inverse=True), axis=-2, inverse=True) / (h * w)


def fft2d(x: np.ndarray) -> SpectralRep:
    """Per-channel 2-D transform of a real grid, as magnitude and phase."""
    z = fft2_complex(np.asarray(x, dtype=np.float64))
    phase = np.angle(z)
    phase[phase <= -np.pi] = np.pi
    return SpectralRep(np.abs(z), phase)


def ifft2d(s: SpectralRep) -> np.ndarray:
    """
    Inverse transform back to a real grid.

    Raises SymmetryError when the imaginary residue exceeds 1e-6, i.e. the
    spectrum was not Hermitian-symmetric.
    """
    out = ifft2_complex(s.complex())
    residue = float(np.abs(out.imag).max()) if out.size else 0.0
    if residue > RESIDUE_LIMIT:
        raise SymmetryError(f"Inverse FFT left an imaginary residue of {residue:.3e}.")
    if residue > RESIDUE_DISCARD:
        logger.warning("Discarding imaginary residue %.3e from inverse FFT", residue)
    return out.real.copy()


def spectral_filter(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Real part of F^-1(mask * F(x)) for a real, radially symmetric mask."""
    return ifft2d(fft2d(x).masked(mask))


def naive_dft2d(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """O(N^4) double-sum DFT of a single (H, W) grid, used as an oracle."""
    x = np.asarray(x, dtype=np.complex128)
    h, w = x.shape
    sign = 1.0 if inverse else -1.0
    out = np.zeros((h, w), dtype=np.complex128)
    for u in range(h):
        for v in range(w):
            total = 0j
            for m in range(h):
                for n in range(w):
                    total += x[m, n] * np.exp(sign * 2j * np.pi * (u * m / h + v * n / w))
            out[u, v] = total
    if inverse:
        out /= h * w
    return out


def next_power_of_two(n: int) -> int:
    return 1 << max(n - 1, 0).bit_length()


def pad_to_pow2(x: np.ndarray) -> Tuple[np.ndarray, Tuple[int, int]]:
    """Zero-pad the trailing two axes up to powers of two; returns (padded, original dims)."""
    h, w = x.shape[-2], x.shape[-1]
    ph, pw = next_power_of_two(h), next_power_of_two(w)
    pad = [(0, 0)] * (x.ndim - 2) + [(0, ph - h), (0, pw - w)]
    return np.pad(x, pad), (h, w)


def crop(x: np.ndarray, dims: Tuple[int, int]) -> np.ndarray:
    return x[..., :dims[0], :dims[1]]


def benchmark(sizes: Sequence[int] = (16, 32, 64, 128, 256), repeats: int = 5,
              seed: int = 0) -> List[Tuple[int, float]]:
    """Best-of-`repeats` fft2d wall time in microseconds per square size."""
    rng = np.random.default_rng(seed)
    timings = []
    for size in sizes:
        grid = rng.standard_normal((size, size))
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            fft2d(grid)
            best = min(best, time.perf_counter() - start)
        timings.append((int(size), best * 1e6))
    return timings
