"""Coefficient model for the 1+1D Klein-Gordon operator.

A :class:`CoefficientSet` holds the electric potential ``V``, the vector
potential ``A``, the scalar coupling ``W`` (all functions of ``(t, x, inv_c)``)
and the metric coefficient ``aleph(t, x)`` multiplying ``c^-4 d_t^2``.
"""

from __future__ import annotations

import re
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CoefficientSet",
    "DecayReport",
    "check_decay",
    "check_even",
    "eval_coeffs",
    "example1",
    "free",
    "gravity_bump",
    "parse_shape",
    "preset",
]

Evaluator = Callable[[float, np.ndarray, float], np.ndarray]


def _zero3(t, x, inv_c):
    return np.zeros_like(np.asarray(x, dtype=float))


def _zero2(t, x):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class CoefficientSet:
    name: str = "custom"
    V: Evaluator = _zero3
    A: Evaluator = _zero3
    W: Evaluator = _zero3
    aleph: Callable = _zero2
    even_in_inv_c: bool = True
    V_t: Evaluator | None = None
    params: dict = field(default_factory=dict, compare=False)

    @property
    def is_free(self) -> bool:
        return not any(self.active(n) for n in ("V", "A", "W", "aleph"))

    def active(self, name: str) -> bool:
        """False when the coefficient is the built-in identically-zero evaluator."""
        return getattr(self, name) not in (_zero3, _zero2)

    def dVdt(self, t, x, inv_c, h: float = 1e-5):
        if self.V_t is not None:
            return self.V_t(t, x, inv_c)
        return (self.V(t + h, x, inv_c) - self.V(t - h, x, inv_c)) / (2 * h)

    def frozen(self) -> CoefficientSet:
        """The c = infinity restriction, as a c-independent set."""
        def at_inf(f):
            return f if f is _zero3 else (lambda t, x, h: f(t, x, 0.0))

        V_t = self.V_t
        return CoefficientSet(
            name=self.name + "@inf",
            V=at_inf(self.V),
            A=at_inf(self.A),
            W=at_inf(self.W),
            aleph=self.aleph,
            even_in_inv_c=True,
            V_t=None if V_t is None else at_inf(V_t),
            params=self.params,
        )

    def scaled(self, factor: Callable[[float], float], which: str = "V", even: bool = False) -> CoefficientSet:
        """Multiply one coefficient by ``factor(inv_c)``."""
        base = getattr(self, which)
        new = lambda t, x, h: factor(h) * base(t, x, h)
        kw = dict(self.__dict__)
        kw[which] = new
        kw["name"] = f"{self.name}*{which}"
        kw["even_in_inv_c"] = even
        if which == "V" and self.V_t is not None:
            vt = self.V_t
            kw["V_t"] = lambda t, x, h: factor(h) * vt(t, x, h)
        return CoefficientSet(**kw)


def eval_coeffs(cs: CoefficientSet, t: float, x, inv_c: float):
    """Evaluate ``(V, A, W, aleph)`` at a point (or an array of x)."""
    if not 0.0 <= inv_c < 1.0:
        raise ValueError(f"inv_c must lie in [0, 1), got {inv_c}")
    out = (cs.V(t, x, inv_c), cs.A(t, x, inv_c), cs.W(t, x, inv_c), cs.aleph(t, x))
    for name, val in zip(["V", "A", "W", "aleph"], out):
        bad = ~np.isfinite(np.asarray(val, dtype=float))
        if bad.any():
            where = np.broadcast_to(np.asarray(x, dtype=float), bad.shape)[bad]
            raise FloatingPointError(f"{cs.name}: {name} is not finite at t={t}, x={where[:3]}")
    return out


@dataclass(frozen=True)
class DecayReport:
    passed: bool
    worst_ratio: float
    slope: float


def check_decay(cs: CoefficientSet, window=(-20.0, 20.0, -20.0, 20.0), n_samples: int = 81, inv_c: float = 0.0) -> DecayReport:
    """Screen for the ``S^-1`` decay class on a finite window.

    Samples ``|coef| * (1 + t^2 + x^2)^(1/2)`` for every coefficient and
    regresses its log against log radius; a slope above 0.1 means growth.
    ``window`` is ``(t_lo, t_hi, x_lo, x_hi)``.
    """
    t_lo, t_hi, x_lo, x_hi = window
    ts = np.linspace(t_lo, t_hi, n_samples)
    xs = np.linspace(x_lo, x_hi, n_samples)
    radius = np.sqrt(1.0 + ts[:, None] ** 2 + xs[None, :] ** 2)
    mag = np.zeros_like(radius)
    for i, t in enumerate(ts):
        vals = eval_coeffs(cs, float(t), xs, inv_c)
        mag[i] = np.max(np.abs(np.vstack([np.broadcast_to(v, xs.shape) for v in vals])), axis=0)
    ratio = mag * radius
    worst = float(ratio.max())
    keep = ratio > 0
    if not keep.any():
        return DecayReport(True, 0.0, 0.0)
    slope = float(np.polyfit(np.log(radius[keep]), np.log(ratio[keep]), 1)[0])
    return DecayReport(slope <= 0.1, worst, slope)


def check_even(cs: CoefficientSet, t: float, x: float, hs=(0.1, 0.05)) -> bool:
    """Ratio test: halving ``h`` should divide ``coef(h) - coef(0)`` by about 4."""
    for which in ("V", "A", "W"):
        f = getattr(cs, which)
        base = float(f(t, np.array([x]), 0.0)[0])
        d = [abs(float(f(t, np.array([x]), h)[0]) - base) for h in hs]
        if max(d) < 1e-14:
            continue
        if d[1] == 0 or not 3.0 <= d[0] / d[1] <= 5.0:
            return False
    return True


# ------------------------------------------------------------------ shapes

def lorentzian(a: float, x0: float, v: float):
    """``a / (1 + (x - x0 + v t)^2)``: a bump whose centre moves as ``x0 - v t``."""
    def V(t, x, h):
        return a / (1.0 + (np.asarray(x, dtype=float) - x0 + v * t) ** 2)

    def V_t(t, x, h):
        s = np.asarray(x, dtype=float) - x0 + v * t
        return -2.0 * a * v * s / (1.0 + s**2) ** 2

    return V, V_t


def gaussian(a: float, x0: float, s: float):
    def f(t, x, h):
        return a * np.exp(-(((np.asarray(x, dtype=float) - x0) / s) ** 2))

    return f, lambda t, x, h: np.zeros_like(np.asarray(x, dtype=float))


def bump_in_t_and_x(a: float, t0: float, x0: float, s: float):
    def f(t, x, h):
        return a * np.exp(-(((t - t0) / s) ** 2) - ((np.asarray(x, dtype=float) - x0) / s) ** 2)

    def f_t(t, x, h):
        return -2.0 * (t - t0) / s**2 * f(t, x, h)

    return f, f_t


SHAPES = {"lorentzian": lorentzian, "gaussian": gaussian, "bump_in_t_and_x": bump_in_t_and_x}
_SHAPE_RE = re.compile(r"^\s*(\w+)\s*\(([^)]*)\)\s*$")


def parse_shape(text: str):
    """Parse ``name(p1, p2, ...)`` from the fixed shape menu."""
    m = _SHAPE_RE.match(text)
    if not m or m.group(1) not in SHAPES:
        raise ValueError(f"unknown coefficient shape {text!r}; choose from {sorted(SHAPES)}")
    args = [float(a) for a in m.group(2).split(",") if a.strip()]
    return SHAPES[m.group(1)](*args)


# ----------------------------------------------------------------- presets

def free() -> CoefficientSet:
    return CoefficientSet(name="free", V_t=_zero3)


def example1(amplitude: float = 8.0) -> CoefficientSet:
    V, V_t = lorentzian(amplitude, 1.0, 1.0)
    return CoefficientSet(name="example1", V=V, V_t=V_t, params={"amplitude": amplitude})


def gravity_bump(m0: float = 1.0) -> CoefficientSet:
    def aleph(t, x):
        return m0 / np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)

    return CoefficientSet(name="gravity_bump", aleph=aleph, V_t=_zero3, params={"m0": m0})


def preset(name: str, m0: float = 1.0, shapes: dict | None = None) -> CoefficientSet:
    if name == "free":
        return free()
    if name == "example1":
        return example1()
    if name == "gravity_bump":
        return gravity_bump(m0)
    if name == "custom":
        shapes = shapes or {}
        kw = {}
        for key in ("V", "A", "W"):
            if shapes.get(key):
                f, f_t = parse_shape(shapes[key])
                kw[key] = f
                if key == "V":
                    kw["V_t"] = f_t
        if shapes.get("aleph"):
            f, _ = parse_shape(shapes["aleph"])
            kw["aleph"] = lambda t, x, _f=f: _f(t, x, 0.0)
        return CoefficientSet(name="custom", **kw)
    raise ValueError(f"unknown preset {name!r}")
