"""Exact spectral solutions of the free Klein-Gordon equation in 1D.

With Cauchy data ``u(0) = phi``, ``u_t(0) = c^2 psi`` the solution splits as
``u = u_+ + u_-`` where

    u_pm = IDFT( exp(+-i c t sqrt(xi^2 + c^2)) phi_hat_pm ),
    phi_hat_pm = (phi_hat -+ i c (xi^2 + c^2)^(-1/2) psi_hat) / 2.

As c grows, ``exp(-+i c^2 t) u_pm`` approaches the free Schrodinger
evolution ``v_pm`` of ``(phi -+ i psi)/2``, and the difference expands as
``c^-2 E_1 + c^-4 E_2 + c^-6 E_3 + ...``.

Also here: a Bessel ``J_0`` evaluator and the retarded Green's function of
``c^-2 d_t^2 - d_x^2 + c^2`` with its space-time convolution.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .core import ComplexField, SpaceTimeGrid
from .dft import Spectrum, boundary_guard, dft_forward, ifft

__all__ = [
    "GREENS_NORMALIZATION",
    "FreeData",
    "bessel_j0",
    "error_expansion_term",
    "free_data",
    "free_evolve",
    "free_evolve_dt",
    "free_phi_pm",
    "greens_1d",
    "greens_convolve",
    "greens_convolve_extrapolated",
    "schrodinger_free",
]

# Prefactors of E_1, E_2, E_3 relative to the 1D inverse transform (1/2pi).
# In d dimensions they read 1/(2^(d+2) pi^d), 1/(2^(d+1) pi^d), 1/(2^(d+5) pi^d)
# against (2 pi)^-d, i.e. 2^-2, 2^-1 and 2^-5 independently of d.
E_PREFACTOR = {1: 0.25, 2: 0.5, 3: 1.0 / 32.0}

# u = GREENS_NORMALIZATION * (G_+ * F) solves P0 u = F with P0 = Box - c^2,
# because G_+ inverts -P0.
GREENS_NORMALIZATION = -1.0


@dataclass(frozen=True)
class FreeData:
    phi_hat_plus: Spectrum
    phi_hat_minus: Spectrum
    c: float

    @property
    def xi(self) -> np.ndarray:
        return self.phi_hat_plus.xi


def free_phi_pm(phi_hat: Spectrum, psi_hat: Spectrum, c: float) -> tuple[Spectrum, Spectrum]:
    """``phi_hat_pm = (phi_hat -+ i c (xi^2+c^2)^(-1/2) psi_hat) / 2``."""
    if not c > 0:
        raise ValueError("c must be positive")
    m = c / np.sqrt(phi_hat.xi**2 + c**2)
    a, b = phi_hat.coefficients, psi_hat.coefficients
    return phi_hat.with_coefficients((a - 1j * m * b) / 2), phi_hat.with_coefficients((a + 1j * m * b) / 2)


def free_data(phi, psi, dx: float, c: float, guard_tol: float = 1e-10) -> FreeData:
    """Transform profiles (power-of-two length) and split into branches."""
    for s in (phi, psi):
        if not boundary_guard(s, guard_tol, warn=False):
            raise ValueError("data is not negligible at the ends of the periodic window")
    plus, minus = free_phi_pm(dft_forward(phi, dx), dft_forward(psi, dx), c)
    return FreeData(plus, minus, float(c))


def _omega(xi, c):
    return c * np.sqrt(xi**2 + c**2)


def free_evolve(data: FreeData, t: float) -> tuple[np.ndarray, np.ndarray]:
    """``(u_plus, u_minus)`` at time ``t``."""
    w = _omega(data.xi, data.c)
    up = ifft(np.exp(1j * t * w) * data.phi_hat_plus.coefficients)
    um = ifft(np.exp(-1j * t * w) * data.phi_hat_minus.coefficients)
    return up, um


def free_evolve_dt(data: FreeData, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Time derivatives of the two branches at time ``t``."""
    w = _omega(data.xi, data.c)
    up = ifft(1j * w * np.exp(1j * t * w) * data.phi_hat_plus.coefficients)
    um = ifft(-1j * w * np.exp(-1j * t * w) * data.phi_hat_minus.coefficients)
    return up, um


def schrodinger_free(phi_hat_inf: Spectrum, sign: int, t: float) -> np.ndarray:
    """Free branch evolution ``IDFT(exp(+-i t xi^2/2) phi_hat)``."""
    xi = phi_hat_inf.xi
    return ifft(np.exp(sign * 0.5j * t * xi**2) * phi_hat_inf.coefficients)


def _band_limited(spectrum: Spectrum, tol: float = 1e-8) -> bool:
    a = np.abs(spectrum.coefficients) ** 2
    total = a.sum()
    if total == 0:
        return True
    k = np.abs(np.fft.fftfreq(spectrum.n)) * spectrum.n
    return a[k >= spectrum.n // 4].sum() <= tol * total


def _e_weights(k: int, xi: np.ndarray, t: float, s: int):
    """Multipliers ``(m_phi, m_psi)`` of the E_k integrand (without the Schrodinger phase)."""
    x2 = xi**2
    tx = t * x2
    if k == 1:
        return -(s * 1j) * x2 * tx / 2, (s * 1j) * x2
    if k == 2:
        return x2**2 * tx * (s * 1j / 8 - tx / 64), x2**2 * (tx / 2 - s * 3j) / 8
    if k == 3:
        m_phi = x2**3 * tx * (-s * 5j / 4 + tx / 4 + s * 1j * tx**2 / 96)
        m_psi = x2**3 * (s * 5j - 5 * tx / 4 - s * 1j * tx**2 / 16)
        return m_phi, m_psi
    raise ValueError("k must be 1, 2 or 3")


def error_expansion_term(k: int, phi_hat_inf: Spectrum, psi_hat: Spectrum, sign: int, t: float, check: bool = True) -> np.ndarray:
    """``E_k`` for branch ``sign`` at time ``t``.

    ``phi_hat_inf`` is the c = infinity branch data ``(phi_hat -+ i psi_hat)/2``.
    The terms satisfy ``exp(-+i c^2 t) u_pm - v_pm = sum_k c^(-2k) E_k``.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if check and not (_band_limited(phi_hat_inf) and _band_limited(psi_hat)):
        raise ValueError("data not band-limited enough for the xi^(2k) weights (top-octave mass >= 1e-8)")
    xi = phi_hat_inf.xi
    m_phi, m_psi = _e_weights(k, xi, t, sign)
    a, b = phi_hat_inf.coefficients, psi_hat.coefficients
    # Modes at rounding level carry no information but the xi^(2k+...) weights
    # would amplify them by up to (pi/dx)^10; drop everything beyond the last
    # mode above 1e-13 of the peak.
    scale = max(np.abs(a).max(), np.abs(b).max())
    live = (np.abs(a) > 1e-13 * scale) | (np.abs(b) > 1e-13 * scale)
    cut = np.abs(xi[live]).max() if live.any() else 0.0
    keep = np.abs(xi) <= cut
    integrand = E_PREFACTOR[k] * np.where(keep, m_phi * a + m_psi * b, 0.0)
    return ifft(np.exp(sign * 0.5j * t * xi**2) * integrand)


# ----------------------------------------------------------------- Bessel

_SERIES_MAX = 12.0


def _j0_series(z: np.ndarray) -> np.ndarray:
    q = -(z * z) / 4.0
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, 80):
        term = term * q / (k * k)
        total = total + term
        if np.all(np.abs(term) < 1e-18 * np.maximum(1.0, np.abs(total))):
            break
    return total


def _j0_asymptotic(z: np.ndarray) -> np.ndarray:
    # Hankel expansion with b_k = prod_{m=1..k} (2m-1)^2 / (k! 8^k):
    # P = sum (-1)^k b_2k z^-2k, Q = -sum (-1)^k b_(2k+1) z^-(2k+1)
    p = np.ones_like(z)
    q = np.zeros_like(z)
    a = 1.0
    inv = 1.0 / z
    power = np.ones_like(z)
    prev = np.full_like(z, np.inf)
    live = np.ones(z.shape, dtype=bool)
    for kk in range(1, 60):
        a *= (2 * kk - 1) ** 2 / (8.0 * kk)
        power = power * inv
        term = a * power
        # stop each point at the smallest term (optimal truncation)
        live &= term < prev
        prev = term
        signed = np.where(live, term if (kk // 2) % 2 == 0 else -term, 0.0)
        if kk % 2:
            q = q - signed
        else:
            p = p + signed
        if not live.any() or np.all(term < 1e-17):
            break
    chi = z - math.pi / 4
    return np.sqrt(2.0 / (math.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j0(z):
    """``J_0(z)`` for ``z >= 0``: power series below 12, Hankel asymptotics above."""
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("bessel_j0 takes z >= 0")
    out = np.empty_like(z)
    small = z < _SERIES_MAX
    out[small] = _j0_series(z[small])
    out[~small] = _j0_asymptotic(z[~small])
    return out if out.ndim else float(out)


def greens_1d(t, x, c: float, sign: int = 1):
    """``(c/2) Theta(sign t) Theta(c^2 t^2 - x^2) J_0(c sqrt(c^2 t^2 - x^2))``.

    On the light cone itself the value is the interior limit ``c/2``; the
    point ``t = 0`` is excluded.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
    s2 = (c * t) ** 2 - x**2
    inside = (sign * t > 0) & (s2 >= 0)
    out = np.zeros(t.shape)
    out[inside] = 0.5 * c * bessel_j0(c * np.sqrt(s2[inside]))
    return out if out.ndim else float(out)


def greens_convolve(f: Callable, c: float, grid: SpaceTimeGrid, source: SpaceTimeGrid | None = None, normalization: float = GREENS_NORMALIZATION) -> ComplexField:
    """Retarded solution ``normalization * (G_+ * f)`` sampled on ``grid``.

    The double integral uses trapezoid weights on ``source`` (defaults to
    ``grid``), restricted to where ``f`` is nonzero.  ``f`` must vanish on
    the source window's edges.
    """
    src = source or grid
    ts, xs = src.t, src.x
    F = np.array([np.asarray(f(s, xs), dtype=complex) for s in ts])
    if np.any(F[0] != 0) or np.any(F[-1] != 0) or np.any(F[:, 0] != 0) or np.any(F[:, -1] != 0):
        raise ValueError("forcing support touches the window boundary")
    wt = np.full(src.nt, src.dt)
    wt[0] = wt[-1] = src.dt / 2
    wx = np.full(src.nx, src.dx)
    wx[0] = wx[-1] = src.dx / 2
    it, ix = np.nonzero(F)
    S, Y = ts[it], xs[ix]
    FW = F[it, ix] * wt[it] * wx[ix]
    out = np.zeros((grid.nt, grid.nx), dtype=complex)
    X = grid.x
    for i, t in enumerate(grid.t):
        dt = t - S
        live = dt > 0
        if not live.any():
            continue
        G = greens_1d(dt[live][None, :], X[:, None] - Y[live][None, :], c, 1)
        out[i] = normalization * (G @ FW[live])
    return ComplexField(grid, out)


def greens_convolve_extrapolated(f: Callable, c: float, grid: SpaceTimeGrid, box: tuple, h: float, normalization: float = GREENS_NORMALIZATION) -> ComplexField:
    """Richardson combination ``2 I(h/2) - I(h)`` of :func:`greens_convolve`.

    The light-cone jump of ``G_+`` limits plain trapezoid sums to first
    order in the source spacing; the combination cancels that term.
    ``box = (x_lo, x_hi, t_lo, t_hi)`` must enclose the support of ``f``.
    """
    x_lo, x_hi, t_lo, t_hi = box
    parts = []
    for step in (h, h / 2):
        nx = int(round((x_hi - x_lo) / step)) + 1
        nt = int(round((t_hi - t_lo) / step)) + 1
        src = SpaceTimeGrid(x_lo, x_hi, nx, t_lo, t_hi, nt)
        parts.append(greens_convolve(f, c, grid, src, normalization).data)
    return ComplexField(grid, 2 * parts[1] - parts[0])
