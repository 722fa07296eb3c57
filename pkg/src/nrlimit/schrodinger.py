"""Limiting Schrodinger problems, data splittings and the two-branch ansatz.

Branch ``s = +1`` or ``-1`` solves

    (s i d_t + (i d_x + A)^2 / 2 + V_eff) v = source,
    V_eff = -s V - W/2 + wiring * aleph / 2,

with coefficients frozen at c = infinity.  In Hamiltonian form
``d_t v = s i (H v - source)`` with ``H = -(1/2) L_A + V_eff`` where
``L_A = -(i d_x + A)^2``.  The normal-operator convention is
``N(P_s) = -2 (s i d_t + (i d_x + A)^2 / 2 + V_eff)``, so ``N(P_s) v = f``
corresponds to ``source = -f/2``.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .coeffs import CoefficientSet
from .core import ComplexField, SpaceTimeGrid
from .stencils import magnetic

__all__ = [
    "DEFAULT_SUBSTEP",
    "AnsatzField",
    "SchrodingerProblem",
    "assemble_ansatz",
    "effective_potential",
    "schrodinger_dt",
    "solve_schrodinger",
    "split_cauchy_data",
    "split_delta_forcing",
]

DEFAULT_SUBSTEP = 5e-4


def split_cauchy_data(phi, psi):
    """``(phi_plus, phi_minus) = ((phi - i psi)/2, (phi + i psi)/2)``."""
    phi = np.asarray(phi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    if phi.shape != psi.shape:
        raise ValueError(f"length mismatch: {phi.shape} vs {psi.shape}")
    return (phi - 1j * psi) / 2, (phi + 1j * psi) / 2


def split_delta_forcing(f, g):
    """``f_pm = f +- i g`` and ``g_pm = (g -+ i f)/2``.

    Returns ``(f_plus, g_plus, f_minus, g_minus)``.  They satisfy
    ``g = g_+ + g_-``, ``f = f_+ + f_- + i g_- - i g_+`` and ``f_pm = +-2i g_pm``.
    """
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if f.shape != g.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {g.shape}")
    return f + 1j * g, (g - 1j * f) / 2, f - 1j * g, (g + 1j * f) / 2


def effective_potential(coeffs: CoefficientSet, branch: int, aleph_wiring: int = 1) -> Callable:
    """``V_eff(t, x) = -branch V - W/2 + aleph_wiring * aleph/2`` at c = infinity."""
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    cs = coeffs

    def V_eff(t, x):
        out = np.zeros_like(np.asarray(x, dtype=float))
        if cs.active("V"):
            out = out - branch * cs.V(t, x, 0.0)
        if cs.active("W"):
            out = out - 0.5 * cs.W(t, x, 0.0)
        if cs.active("aleph"):
            out = out + 0.5 * aleph_wiring * cs.aleph(t, x)
        return out

    return V_eff


@dataclass(frozen=True)
class SchrodingerProblem:
    """One branch of the limiting problem.

    ``forcing`` is ``f(t, x)`` in ``N(P_branch) v = f``; ``ic`` is the data at
    ``t = 0`` (Cauchy) and must be absent for retarded/advanced problems.
    """

    branch: int
    coeffs: CoefficientSet
    grid: SpaceTimeGrid
    ic: np.ndarray | None = None
    forcing: Callable | None = None
    support: str = "cauchy"
    aleph_wiring: int = 1
    substep: float = DEFAULT_SUBSTEP
    potential: Callable | None = None

    def __post_init__(self):
        if self.branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if self.support not in ("cauchy", "retarded", "advanced"):
            raise ValueError(f"unknown support {self.support!r}")
        if self.support == "cauchy" and not self.grid.t_min <= 0.0 <= self.grid.t_max:
            raise ValueError("Cauchy problem needs t_min <= 0 <= t_max")
        if self.support != "cauchy" and self.ic is not None and np.any(self.ic):
            raise ValueError(f"{self.support} problem takes zero data")
        if self.ic is not None and np.shape(self.ic) != (self.grid.nx,):
            raise ValueError("ic must have length nx")

    def v_eff(self) -> Callable:
        if self.potential is not None:
            return self.potential
        return effective_potential(self.coeffs, self.branch, self.aleph_wiring)

    def source(self, t: float, x: np.ndarray):
        if self.forcing is None:
            return None
        return -0.5 * np.asarray(self.forcing(t, x), dtype=complex)


def _hamiltonian_bands(V: np.ndarray, A: np.ndarray | None, dx: float):
    """Tridiagonal ``H = -(1/2) L_A + V`` on interior nodes as (super, diag, sub)."""
    inv = 1.0 / (2.0 * dx * dx)
    diag = (2.0 * inv + V).astype(complex)
    sup = np.full(V.size - 1, -inv, dtype=complex)
    sub = np.full(V.size - 1, -inv, dtype=complex)
    if A is not None:
        diag += 0.5 * A**2
        pair = (A[:-1] + A[1:]) / (4.0 * dx)
        sup += 1j * pair
        sub -= 1j * pair
    return sup, diag, sub


def _apply(sup, diag, sub, v):
    out = diag * v
    out[:-1] += sup * v[1:]
    out[1:] += sub * v[:-1]
    return out


def _cn_step(p: SchrodingerProblem, t: float, v: np.ndarray, dt: float, V_eff, x, A_fn) -> np.ndarray:
    """Crank-Nicolson step on interior nodes with the Hamiltonian at ``t + dt/2``."""
    tm = t + dt / 2
    xi = x[1:-1]
    A = A_fn(tm, xi) if A_fn is not None else None
    sup, diag, sub = _hamiltonian_bands(V_eff(tm, xi), A, x[1] - x[0])
    z = 0.5j * p.branch * dt
    rhs = v + z * _apply(sup, diag, sub, v)
    s = p.source(tm, xi)
    if s is not None:
        rhs = rhs - 2 * z * s
    ab = np.zeros((3, v.size), dtype=complex)
    ab[0, 1:] = -z * sup
    ab[1] = 1.0 - z * diag
    ab[2, :-1] = -z * sub
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def solve_schrodinger(p: SchrodingerProblem) -> ComplexField:
    """Crank-Nicolson history on the output grid (internal steps <= ``p.substep``)."""
    g = p.grid
    x, times = g.x, g.t
    V_eff = p.v_eff()
    A_fn = (lambda t, xi: p.coeffs.A(t, xi, 0.0)) if p.coeffs.active("A") else None
    out = np.zeros((g.nt, g.nx), dtype=complex)
    v0 = np.zeros(g.nx - 2, dtype=complex)
    if p.ic is not None:
        v0 = np.asarray(p.ic, dtype=complex)[1:-1].copy()
    if p.support == "cauchy":
        start = 0.0
        runs = ([i for i in range(g.nt) if times[i] >= 0.0], [i for i in range(g.nt) if times[i] < 0.0][::-1])
    elif p.support == "retarded":
        start, runs = g.t_min, (list(range(g.nt)), [])
    else:
        start, runs = g.t_max, ([], list(range(g.nt))[::-1])
    for order in runs:
        t, v = start, v0
        for i in order:
            span = times[i] - t
            n = int(math.ceil(abs(span) / p.substep - 1e-12)) if span else 0
            for _ in range(n):
                v = _cn_step(p, t, v, span / n, V_eff, x, A_fn)
                t += span / n
            t = times[i]
            out[i, 1:-1] = v
    return ComplexField(g, out)


def schrodinger_dt(p: SchrodingerProblem, v: ComplexField) -> ComplexField:
    """``d_t v = branch * i (H v - source)`` evaluated from the equation itself."""
    g = v.grid
    x = g.x
    V_eff = p.v_eff()
    out = np.zeros((g.nt, g.nx), dtype=complex)
    for i, t in enumerate(g.t):
        A = p.coeffs.A(t, x, 0.0) if p.coeffs.active("A") else None
        Hv = -0.5 * magnetic(v.data[i], A, g.dx) + V_eff(t, x) * v.data[i]
        s = p.source(t, x)
        if s is not None:
            Hv = Hv - s
        out[i] = 1j * p.branch * Hv
    out[:, 0] = out[:, -1] = 0.0
    return ComplexField(g, out)


@dataclass(frozen=True)
class AnsatzField:
    """``v = exp(-i c^2 t) v_minus + exp(i c^2 t) v_plus``.

    ``inv_c2_dtv`` (when both branch time derivatives were supplied) holds
    ``c^-2 d_t v`` computed by the product rule.
    """

    v: ComplexField
    v_minus: ComplexField
    v_plus: ComplexField
    c: float
    inv_c2_dtv: ComplexField | None = None


def assemble_ansatz(v_minus: ComplexField, v_plus: ComplexField, c: float, dtv_minus: ComplexField | None = None, dtv_plus: ComplexField | None = None) -> AnsatzField:
    if v_minus.grid != v_plus.grid or v_minus.kind != v_plus.kind:
        raise ValueError("grid mismatch between branches")
    g = v_minus.grid
    t = g.t[:, None] if v_minus.kind == "history" else g.t[:1, None]
    em, ep = np.exp(-1j * c**2 * t), np.exp(1j * c**2 * t)
    v = ComplexField(g, em * v_minus.data + ep * v_plus.data, v_minus.kind)
    dtv = None
    if dtv_minus is not None and dtv_plus is not None:
        c2 = c**2
        data = em * (-1j * v_minus.data + dtv_minus.data / c2) + ep * (1j * v_plus.data + dtv_plus.data / c2)
        dtv = ComplexField(g, data, v_minus.kind)
    return AnsatzField(v, v_minus, v_plus, c, dtv)
