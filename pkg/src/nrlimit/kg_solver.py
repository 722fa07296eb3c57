"""Method-of-lines solver for the 1+1D Klein-Gordon equation ``P u = F``.

With ``P = -c^-2 (d_t + iV)^2 - (i d_x + A)^2 - c^2 + W + c^-4 aleph d_t^2``
the evolved second-order system is

    c^-2 (1 - aleph/c^2) u_tt = -(i d_x + A)^2 u - c^2 u + W u
                                - 2i V c^-2 u_t + c^-2 (V^2 - i V_t) u - F

discretized with centered differences, Dirichlet walls and classical RK4 on
the state ``(u, u_t)``.  The time step is chosen internally below the
imaginary-axis stability limit of RK4; output times only set what is stored.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from .coeffs import CoefficientSet
from .core import ComplexField, SpaceTimeGrid
from .stencils import forward_gradient_sq, magnetic

__all__ = ["KGProblem", "KGSolution", "StabilityError", "kg_energy", "max_stable_step", "solve_kg"]

RK4_IMAG_LIMIT = 2.8  # |z| on the imaginary axis where |R(z)| <= 1 (2*sqrt(2) exactly)
SAFETY = 0.8
EDGE_NODES = 5


class StabilityError(ValueError):
    """Requested step exceeds the explicit stability bound."""


@dataclass(frozen=True)
class KGProblem:
    """Cauchy data ``u(0) = phi``, ``u_t(0) = c^2 psi`` or a retarded/advanced forced problem.

    ``forcing`` is ``F(t, x)``; ``max_step`` optionally caps the internal
    step (it must itself respect the stability bound).
    """

    coeffs: CoefficientSet
    c: float
    grid: SpaceTimeGrid
    phi: np.ndarray | None = None
    psi: np.ndarray | None = None
    forcing: Callable | None = None
    support: str = "cauchy"
    scheme: str = "rk4_mol"
    max_step: float | None = None

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if self.scheme != "rk4_mol":
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.support not in ("cauchy", "retarded", "advanced"):
            raise ValueError(f"unknown support {self.support!r}")
        g = self.grid
        if self.support == "cauchy":
            if not g.t_min <= 0.0 <= g.t_max:
                raise ValueError("Cauchy problem needs t_min <= 0 <= t_max")
            for name in ("phi", "psi"):
                arr = getattr(self, name)
                if arr is not None and (np.shape(arr) != (g.nx,) or not np.all(np.isfinite(arr))):
                    raise ValueError(f"{name} must be a finite array of length nx")
        else:
            if self.phi is not None and np.any(self.phi) or self.psi is not None and np.any(self.psi):
                raise ValueError(f"{self.support} problem takes zero data")
            if self.forcing is None:
                raise ValueError(f"{self.support} problem needs a forcing term")
            t0 = g.t_min if self.support == "retarded" else g.t_max
            if np.any(np.asarray(self.forcing(t0, g.x)) != 0):
                raise ValueError(f"forcing must vanish at the {self.support} start time {t0}")


@dataclass(frozen=True)
class KGSolution:
    u: ComplexField
    dtu: ComplexField
    boundary: np.ndarray
    domain_warning: bool
    steps: int
    step: float


def _coef_bounds(p: KGProblem):
    cs, g, h = p.coeffs, p.grid, 1.0 / p.c
    ts = np.linspace(g.t_min, g.t_max, 9)
    amax = vmax = wmax = almax = 0.0
    for t in ts:
        if cs.active("A"):
            amax = max(amax, float(np.max(np.abs(cs.A(t, g.x, h)))))
        if cs.active("V"):
            vmax = max(vmax, float(np.max(np.abs(cs.V(t, g.x, h)))))
        if cs.active("W"):
            wmax = max(wmax, float(np.max(np.abs(cs.W(t, g.x, h)))))
        if cs.active("aleph"):
            almax = max(almax, float(np.max(np.abs(cs.aleph(t, g.x)))))
    return amax, vmax, wmax, almax


def max_stable_step(p: KGProblem) -> float:
    """``0.8 * 2.8 / omega_max`` for the semidiscrete spectrum.

    ``omega_max = c sqrt((pi/dx)^2 + c^2)`` for the flat free operator,
    enlarged by the coefficient bounds and the aleph factor.
    """
    c, dx = p.c, p.grid.dx
    amax, vmax, wmax, almax = _coef_bounds(p)
    if almax / c**2 >= 0.5:
        raise ValueError(f"|aleph|/c^2 = {almax / c**2:.3f} is not below 0.5; time coefficient degenerates")
    omega = c * math.sqrt((math.pi / dx + amax) ** 2 + c**2 + wmax) / math.sqrt(1.0 - almax / c**2) + vmax
    return SAFETY * RK4_IMAG_LIMIT / omega


def _make_rhs(p: KGProblem):
    cs, g, c = p.coeffs, p.grid, p.c
    x, dx, h = g.x, g.dx, 1.0 / c
    c2 = c * c
    use_A, use_V, use_W, use_al = (cs.active(n) for n in ("A", "V", "W", "aleph"))
    interior = np.ones(g.nx)
    interior[0] = interior[-1] = 0.0
    F = p.forcing

    def rhs(t, u, w):
        A = cs.A(t, x, h) if use_A else None
        acc = magnetic(u, A, dx) - c2 * u
        if use_W:
            acc = acc + cs.W(t, x, h) * u
        if F is not None:
            acc = acc - F(t, x)
        acc = c2 * acc
        if use_V:
            V = cs.V(t, x, h)
            acc = acc - 2j * V * w + (V**2 - 1j * cs.dVdt(t, x, h)) * u
        if use_al:
            acc = acc / (1.0 - cs.aleph(t, x) / c2)
        return w, acc * interior

    return rhs


def _rk4(rhs, t, u, w, dt):
    k1u, k1w = rhs(t, u, w)
    k2u, k2w = rhs(t + dt / 2, u + dt / 2 * k1u, w + dt / 2 * k1w)
    k3u, k3w = rhs(t + dt / 2, u + dt / 2 * k2u, w + dt / 2 * k2w)
    k4u, k4w = rhs(t + dt, u + dt * k3u, w + dt * k3w)
    return (
        u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u),
        w + dt / 6 * (k1w + 2 * k2w + 2 * k3w + k4w),
    )


def solve_kg(p: KGProblem) -> KGSolution:
    """Integrate to every output time of ``p.grid``.

    Cauchy problems start at ``t = 0`` and run in both directions as needed;
    retarded problems start from rest at ``t_min``, advanced ones at ``t_max``.
    """
    g = p.grid
    dt_max = max_stable_step(p)
    if p.max_step is not None:
        if p.max_step > dt_max:
            raise StabilityError(f"max_step {p.max_step:.3e} exceeds stability bound {dt_max:.3e}")
        dt_max = p.max_step
    rhs = _make_rhs(p)
    times = g.t
    U = np.zeros((g.nt, g.nx), dtype=complex)
    Wt = np.zeros_like(U)

    zero = np.zeros(g.nx, dtype=complex)
    if p.support == "cauchy":
        u0 = zero.copy() if p.phi is None else np.asarray(p.phi, dtype=complex).copy()
        w0 = zero.copy() if p.psi is None else p.c**2 * np.asarray(p.psi, dtype=complex)
        u0[0] = u0[-1] = w0[0] = w0[-1] = 0.0
        start = 0.0
        forward = [i for i in range(g.nt) if times[i] >= 0.0]
        backward = [i for i in range(g.nt) if times[i] < 0.0][::-1]
    elif p.support == "retarded":
        u0, w0, start = zero.copy(), zero.copy(), g.t_min
        forward, backward = list(range(g.nt)), []
    else:
        u0, w0, start = zero.copy(), zero.copy(), g.t_max
        forward, backward = [], list(range(g.nt))[::-1]

    steps = 0
    for order in (forward, backward):
        t, u, w = start, u0, w0
        for i in order:
            span = times[i] - t
            n = int(math.ceil(abs(span) / dt_max - 1e-12)) if span else 0
            for _ in range(n):
                u, w = _rk4(rhs, t, u, w, span / n)
                t += span / n
            steps += n
            t = times[i]
            U[i], Wt[i] = u, w
            if not np.all(np.isfinite(u)):
                raise FloatingPointError(f"KG solve diverged at t={t}")

    edge = np.maximum(np.abs(U[:, 1 : 1 + EDGE_NODES]).max(axis=1), np.abs(U[:, -1 - EDGE_NODES : -1]).max(axis=1))
    peak = np.abs(U).max()
    warn = bool(peak > 0 and edge.max() > 1e-3 * peak)
    return KGSolution(ComplexField(g, U), ComplexField(g, Wt), edge, warn, steps, dt_max)


def kg_energy(sol: KGSolution, c: float) -> np.ndarray:
    """``int c^-2 |u_t|^2 + |u_x|^2 + c^2 |u|^2 dx`` at each stored time.

    Uses the forward-difference gradient, which is the quantity conserved by
    the semidiscrete free system.
    """
    dx = sol.u.grid.dx
    u, w = sol.u.data, sol.dtu.data
    return (
        np.sum(np.abs(w) ** 2, axis=1) * dx / c**2
        + forward_gradient_sq(u, dx)
        + c**2 * np.sum(np.abs(u) ** 2, axis=1) * dx
    )
