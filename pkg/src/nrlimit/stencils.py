"""Second-order finite-difference stencils with homogeneous Dirichlet walls.

All functions act on the last axis and return zero at the two wall nodes.
"""

from __future__ import annotations

import numpy as np


def d1(u: np.ndarray, dx: float) -> np.ndarray:
    """Centered first difference."""
    out = np.zeros_like(u)
    out[..., 1:-1] = (u[..., 2:] - u[..., :-2]) / (2.0 * dx)
    return out


def d2(u: np.ndarray, dx: float) -> np.ndarray:
    """Three-point second difference."""
    out = np.zeros_like(u)
    out[..., 1:-1] = (u[..., 2:] - 2.0 * u[..., 1:-1] + u[..., :-2]) / dx**2
    return out


def magnetic(u: np.ndarray, A: np.ndarray | None, dx: float) -> np.ndarray:
    """``-(i d_x + A)^2 u = u'' - i((A u)' + A u') - A^2 u``.

    The symmetric split ``(A u)' + A u'`` keeps the discrete operator
    Hermitian for real ``A``.
    """
    out = d2(u, dx)
    if A is not None:
        out = out - 1j * (d1(A * u, dx) + A * d1(u, dx)) - A**2 * u
        out[..., 0] = out[..., -1] = 0.0
    return out


def forward_gradient_sq(u: np.ndarray, dx: float) -> np.ndarray:
    """``sum |u_{i+1} - u_i|^2 / dx`` per row: the energy paired with :func:`d2`."""
    return np.sum(np.abs(np.diff(u, axis=-1)) ** 2, axis=-1) / dx
