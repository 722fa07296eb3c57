"""Radix-2 discrete Fourier transform and Fourier multipliers.

Conventions
-----------
forward:  X_k = sum_j x_j exp(-2 pi i j k / n)
inverse:  x_j = (1/n) sum_k X_k exp(+2 pi i j k / n)

so that ``sum |x|^2 == sum |X|^2 / n``.  Bin ``k`` carries the angular
frequency ``xi_k = 2 pi k / (n dx)`` with ``k`` taken in the symmetric range
``[-n/2, n/2)`` (same ordering as ``numpy.fft.fftfreq``).
"""

from __future__ import annotations

import warnings
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "PeriodicityWarning",
    "Spectrum",
    "boundary_guard",
    "dft_forward",
    "dft_inverse",
    "fft",
    "fourier_multiplier",
    "frequencies",
    "ifft",
    "next_pow2",
    "spectral_derivative",
]


class PeriodicityWarning(UserWarning):
    """Samples are not negligible at the ends of a periodic window."""


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def next_pow2(n: int) -> int:
    return 1 << max(0, (int(n) - 1).bit_length())


@lru_cache(maxsize=32)
def _bitrev(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.setflags(write=False)
    return rev


@lru_cache(maxsize=64)
def _twiddles(size: int, sign: int) -> np.ndarray:
    w = np.exp(sign * 2j * np.pi * np.arange(size // 2) / size)
    w.setflags(write=False)
    return w


def _radix2(a: np.ndarray, sign: int) -> np.ndarray:
    """Iterative decimation-in-time butterfly over the last axis."""
    n = a.shape[-1]
    if not _is_pow2(n):
        raise ValueError(f"length {n} is not a power of two")
    lead = a.shape[:-1]
    out = np.asarray(a, dtype=complex)[..., _bitrev(n)]
    size = 2
    while size <= n:
        half = size // 2
        blocks = out.reshape(lead + (n // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * _twiddles(size, sign)
        out = np.concatenate((even + odd, even - odd), axis=-1).reshape(lead + (n,))
        size *= 2
    return out


def fft(a) -> np.ndarray:
    """Unnormalized forward transform along the last axis."""
    return _radix2(np.asarray(a), -1)


def ifft(a) -> np.ndarray:
    """Inverse of :func:`fft` (carries the 1/n)."""
    a = np.asarray(a)
    return _radix2(a, +1) / a.shape[-1]


def frequencies(n: int, dx: float) -> np.ndarray:
    k = np.arange(n)
    k = np.where(k < n // 2, k, k - n)
    return 2 * np.pi * k / (n * dx)


@dataclass(frozen=True)
class Spectrum:
    coefficients: np.ndarray
    dx: float
    x0: float = 0.0

    @property
    def n(self) -> int:
        return self.coefficients.shape[-1]

    @property
    def xi(self) -> np.ndarray:
        return frequencies(self.n, self.dx)

    def with_coefficients(self, coefficients) -> Spectrum:
        return Spectrum(np.asarray(coefficients, dtype=complex), self.dx, self.x0)


def dft_forward(samples, dx: float, pad: bool = False, x0: float = 0.0) -> Spectrum:
    """Transform samples on a uniform grid.

    Non power-of-two lengths are an error unless ``pad`` is set, in which case
    the samples are zero-extended on the right (this changes the period).
    """
    samples = np.asarray(samples, dtype=complex)
    n = samples.shape[-1]
    if not _is_pow2(n):
        if not pad:
            raise ValueError(f"length {n} is not a power of two; pass pad=True to zero-extend")
        m = next_pow2(n)
        widths = [(0, 0)] * (samples.ndim - 1) + [(0, m - n)]
        samples = np.pad(samples, widths)
    return Spectrum(fft(samples), float(dx), float(x0))


def dft_inverse(spectrum: Spectrum) -> np.ndarray:
    return ifft(spectrum.coefficients)


def boundary_guard(samples, tol: float = 1e-10, warn: bool = True) -> bool:
    """True when the end samples are below ``tol`` (periodic extension is harmless)."""
    samples = np.asarray(samples)
    edge = max(np.abs(samples[..., 0]).max(), np.abs(samples[..., -1]).max())
    ok = bool(edge < tol)
    if not ok and warn:
        warnings.warn(f"boundary magnitude {edge:.3e} exceeds {tol:.1e}", PeriodicityWarning, stacklevel=3)
    return ok


def fourier_multiplier(samples, dx: float, m: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply the multiplier ``m(xi)`` and transform back."""
    spectrum = dft_forward(samples, dx)
    weights = np.asarray(m(spectrum.xi), dtype=complex)
    weights = np.broadcast_to(weights, spectrum.coefficients.shape[-1:])
    if not np.all(np.isfinite(weights)):
        raise FloatingPointError("multiplier is not finite on the grid frequencies")
    return ifft(spectrum.coefficients * weights)


def spectral_derivative(samples, dx: float, order: int = 1) -> np.ndarray:
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    n = np.asarray(samples).shape[-1]

    def symbol(xi):
        s = (1j * xi) ** order
        if order == 1:
            # the Nyquist bin has no antisymmetric partner
            s = s.copy()
            s[n // 2] = 0.0
        return s

    return fourier_multiplier(samples, dx, symbol)
