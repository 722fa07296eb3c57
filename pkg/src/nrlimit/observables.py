"""Charge and current densities, the interference (Zitterbewegung) current and error fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ComplexField, SpaceTimeGrid
from .stencils import d1

__all__ = ["CurrentPair", "error_field", "four_current", "nr_current", "zitterbewegung"]


@dataclass(frozen=True)
class CurrentPair:
    grid: SpaceTimeGrid
    rho: np.ndarray
    j: np.ndarray


def _same(*fields: ComplexField) -> SpaceTimeGrid:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g or f.kind != fields[0].kind:
            raise ValueError("grid mismatch between fields")
    return g


def four_current(u: ComplexField, dtu: ComplexField, c: float) -> CurrentPair:
    """``rho = c^-2 Im(conj(u) u_t)`` and ``j = Im(conj(u) D u)``.

    ``dtu`` must be the solver's own time derivative.
    """
    g = _same(u, dtu)
    ub = np.conj(u.data)
    return CurrentPair(g, np.imag(ub * dtu.data) / c**2, np.imag(ub * d1(u.data, g.dx)))


def nr_current(v_minus: ComplexField, v_plus: ComplexField) -> CurrentPair:
    """``rho_cl = |v+|^2 - |v-|^2`` and ``j_cl = Im(conj(v+) D v+) + Im(conj(v-) D v-)``."""
    g = _same(v_minus, v_plus)
    vm, vp = v_minus.data, v_plus.data
    rho = np.abs(vp) ** 2 - np.abs(vm) ** 2
    j = np.imag(np.conj(vp) * d1(vp, g.dx)) + np.imag(np.conj(vm) * d1(vm, g.dx))
    return CurrentPair(g, rho, j)


def zitterbewegung(v_minus: ComplexField, v_plus: ComplexField, c: float) -> np.ndarray:
    """``Im(exp(-2i c^2 t) conj(v+) D v- + exp(2i c^2 t) conj(v-) D v+)``."""
    g = _same(v_minus, v_plus)
    t = g.t[:, None] if v_minus.kind == "history" else g.t[:1, None]
    ph = np.exp(2j * c**2 * t)
    vm, vp = v_minus.data, v_plus.data
    return np.imag(np.conj(ph) * np.conj(vp) * d1(vm, g.dx) + ph * np.conj(vm) * d1(vp, g.dx))


def error_field(u: ComplexField, v: ComplexField, derivative: str = "none", c: float = 1.0, dtu: ComplexField | None = None, inv_c2_dtv: ComplexField | None = None) -> ComplexField:
    """``L (u - v)`` with ``L`` the identity, ``c^-2 d_t`` or ``d_x``.

    For ``inv_c2_dt`` pass the solver's ``dtu`` and the ansatz's
    product-rule ``c^-2 d_t v``; nothing is differenced in time.
    """
    g = _same(u, v)
    if derivative == "none":
        return u - v
    if derivative == "dx":
        return ComplexField(g, d1(u.data - v.data, g.dx), u.kind)
    if derivative == "inv_c2_dt":
        if dtu is None or inv_c2_dtv is None:
            raise ValueError("inv_c2_dt needs dtu and inv_c2_dtv")
        _same(u, dtu, inv_c2_dtv)
        return ComplexField(g, dtu.data / c**2 - inv_c2_dtv.data, u.kind)
    raise ValueError(f"unknown derivative {derivative!r}")
