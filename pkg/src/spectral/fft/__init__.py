from .core import (
    SpectralRep,
    benchmark,
    crop,
    fft,
    fft2_complex,
    fft2d,
    ifft2_complex,
    ifft2d,
    is_power_of_two,
    naive_dft2d,
    next_power_of_two,
    pad_to_pow2,
    spectral_filter,
)

__all__ = [
    "SpectralRep",
    "benchmark",
    "crop",
    "fft",
    "fft2_complex",
    "fft2d",
    "ifft2_complex",
    "ifft2d",
    "is_power_of_two",
    "naive_dft2d",
    "next_power_of_two",
    "pad_to_pow2",
    "spectral_filter",
]
