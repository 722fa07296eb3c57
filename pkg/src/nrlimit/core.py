"""Grids, complex fields, weighted norms, run configuration and CSV output.

Everything here is immutable after construction so that fields and grids can
be shared read-only between independent solves.
"""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

__all__ = [
    "SWEEP_COLUMNS",
    "ComplexField",
    "ConfigError",
    "RunConfig",
    "SpaceTimeGrid",
    "WeightSpec",
    "emit_csv",
    "load_config",
    "make_grid",
    "read_csv",
    "weighted_norm",
]

SWEEP_COLUMNS = ("c", "sup_err", "weighted_err", "sup_err_dtu", "sup_err_dxu")


class ConfigError(ValueError):
    """Malformed or unknown configuration entry."""


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform (t, x) lattice.

    ``dx`` and ``dt`` are derived exactly as ``(max - min) / (n - 1)``.
    """

    x_min: float
    x_max: float
    nx: int
    t_min: float
    t_max: float
    nt: int

    def __post_init__(self):
        if self.nx < 3:
            raise ValueError(f"nx must be >= 3, got {self.nx}")
        if self.nt < 2:
            raise ValueError(f"nt must be >= 2, got {self.nt}")
        if not self.x_max > self.x_min:
            raise ValueError("degenerate spatial interval")
        if not self.t_max > self.t_min:
            raise ValueError("degenerate time interval")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.nt - 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.nx) * self.dx

    @property
    def t(self) -> np.ndarray:
        return self.t_min + np.arange(self.nt) * self.dt

    def with_times(self, t_min: float, t_max: float, nt: int) -> SpaceTimeGrid:
        return replace(self, t_min=t_min, t_max=t_max, nt=nt)

    def window_mask(self, x_lo: float, x_hi: float, t_lo: float, t_hi: float):
        """Boolean (t, x) masks selecting a sub-window, boundaries included."""
        tol_x = 1e-9 * self.dx
        tol_t = 1e-9 * max(self.dt, 1e-300)
        tm = (self.t >= t_lo - tol_t) & (self.t <= t_hi + tol_t)
        xm = (self.x >= x_lo - tol_x) & (self.x <= x_hi + tol_x)
        return tm, xm


def make_grid(x_min: float, x_max: float, nx: int, t_min: float, t_max: float, nt: int) -> SpaceTimeGrid:
    """Build a :class:`SpaceTimeGrid`, rejecting invalid extents."""
    if x_max == x_min:
        raise ValueError("degenerate spatial interval")
    return SpaceTimeGrid(float(x_min), float(x_max), int(nx), float(t_min), float(t_max), int(nt))


@dataclass(frozen=True)
class ComplexField:
    """Complex samples on a grid, shape ``(nt, nx)`` (history) or ``(1, nx)`` (snapshot)."""

    grid: SpaceTimeGrid
    data: np.ndarray
    kind: str = "history"

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        if data.ndim == 1:
            data = data[None, :]
        if self.kind not in ("history", "snapshot"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        expected = (self.grid.nt, self.grid.nx) if self.kind == "history" else (1, self.grid.nx)
        if data.shape != expected:
            raise ValueError(f"field shape {data.shape} does not match grid {expected}")
        if not np.all(np.isfinite(data)):
            raise FloatingPointError("field contains NaN or Inf samples")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    def __sub__(self, other: ComplexField) -> ComplexField:
        self._check(other)
        return ComplexField(self.grid, self.data - other.data, self.kind)

    def __add__(self, other: ComplexField) -> ComplexField:
        self._check(other)
        return ComplexField(self.grid, self.data + other.data, self.kind)

    def scale(self, alpha: complex) -> ComplexField:
        return ComplexField(self.grid, alpha * self.data, self.kind)

    def _check(self, other: ComplexField) -> None:
        if other.grid != self.grid or other.kind != self.kind:
            raise ValueError("grid mismatch between fields")

    def window(self, x_lo: float, x_hi: float, t_lo: float = -math.inf, t_hi: float = math.inf):
        """Return ``(t, x, samples)`` restricted to a rectangular window."""
        tm, xm = self.grid.window_mask(x_lo, x_hi, t_lo, t_hi)
        t = self.grid.t if self.kind == "history" else self.grid.t[:1]
        if self.kind == "snapshot":
            tm = np.ones(1, dtype=bool)
        return t[tm], self.grid.x[xm], self.data[np.ix_(tm, xm)]


@dataclass(frozen=True)
class WeightSpec:
    """Norm selector: plain sup, or the spacetime weight ``(1+x^2+t^2)^(-3/4-eps)``."""

    kind: str = "plain_sup"
    epsilon: float = 0.1
    p: float = math.inf

    def __post_init__(self):
        if self.kind not in ("plain_sup", "spacetime_weighted"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.p not in (2, math.inf):
            raise ValueError("p must be 2 or inf")

    def weight(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        tt, xx = np.meshgrid(t, x, indexing="ij")
        if self.kind == "plain_sup":
            return np.ones_like(tt)
        return (1.0 + xx**2 + tt**2) ** (-0.75 - self.epsilon)


def _trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    if n == 1:
        return np.ones(1)
    w[0] = w[-1] = h / 2
    return w


def weighted_norm(f: ComplexField, w: WeightSpec = WeightSpec(), window=None) -> float:
    """Weighted sup or L^2 norm of ``f`` over the grid or a sub-window.

    ``window`` is ``(x_lo, x_hi, t_lo, t_hi)``; the L^2 variant uses
    trapezoid weights in both t and x.
    """
    if window is None:
        t, x, data = f.window(f.grid.x_min, f.grid.x_max)
    else:
        t, x, data = f.window(*window)
    if np.isnan(data).any():
        raise FloatingPointError("NaN in field")
    weighted = w.weight(t, x) * np.abs(data)
    if weighted.size == 0:
        return 0.0
    if w.p == math.inf:
        return float(weighted.max())
    wt = _trapezoid_weights(len(t), f.grid.dt if len(t) > 1 else 1.0)
    wx = _trapezoid_weights(len(x), f.grid.dx)
    return float(math.sqrt(np.einsum("i,j,ij->", wt, wx, weighted**2)))


def emit_csv(rows: Iterable[Mapping[str, float]] | Sequence[Sequence[float]], path, columns: Sequence[str] | None = None) -> Path:
    """Write rows to ``path`` with a mandatory header.

    Rows may be mappings (keyed by ``columns``) or plain sequences.  Floats
    are written with ``repr`` so a read-back reproduces them exactly.
    """
    path = Path(path)
    rows = list(rows)
    if columns is None:
        if rows and isinstance(rows[0], Mapping):
            columns = list(rows[0].keys())
        else:
            columns = list(SWEEP_COLUMNS)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                values = [row[k] for k in columns] if isinstance(row, Mapping) else list(row)
                writer.writerow([_fmt(v) for v in values])
    except OSError as exc:
        raise OSError(f"failed writing CSV to {path}: {exc}") from exc
    return path


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a file written by :func:`emit_csv`; returns header and float array."""
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        body = [[float(v) for v in row] for row in reader]
    return header, np.array(body, dtype=float).reshape(len(body), len(header))


# ---------------------------------------------------------------- config

CONFIG_KEYS = {
    "preset": "coefficient preset: free, example1, gravity_bump or custom",
    "x_min": "left Dirichlet wall",
    "x_max": "right Dirichlet wall",
    "nx": "number of spatial nodes (walls included)",
    "t_min": "first output time",
    "t_max": "last output time",
    "nt": "number of output times",
    "c_list": "comma-separated speeds of light",
    "scheme": "time integrator for the relativistic solve (rk4_mol)",
    "epsilon": "exponent offset of the spacetime weight",
    "out_dir": "directory receiving CSV output",
    # extensions
    "m0": "mass parameter of the gravity_bump preset",
    "aleph_wiring": "sign of the aleph/2 term in the effective potential (+1 or -1)",
    "stride": "time stride for CSV snapshots",
    "coef_V": "custom V shape, e.g. lorentzian(8,1,-1)",
    "coef_A": "custom A shape",
    "coef_W": "custom W shape",
    "coef_aleph": "custom aleph shape",
    "data_width": "width w of the initial profile exp(-(x/w)^2)",
    "data_psi": "initial velocity profile: zero or x (x times the profile)",
}


@dataclass(frozen=True)
class RunConfig:
    preset: str = "example1"
    x_min: float = -10.0
    x_max: float = 10.0
    nx: int = 2001
    t_min: float = 0.0
    t_max: float = 2.0
    nt: int = 401
    c_list: tuple = (3.0, 4.0, 6.0, 8.0)
    scheme: str = "rk4_mol"
    epsilon: float = 0.1
    out_dir: str = "out"
    m0: float = 1.0
    aleph_wiring: int = 1
    stride: int = 10
    coef_V: str = ""
    coef_A: str = ""
    coef_W: str = ""
    coef_aleph: str = ""
    data_width: float = 1.0
    data_psi: str = "zero"

    def grid(self) -> SpaceTimeGrid:
        return make_grid(self.x_min, self.x_max, self.nx, self.t_min, self.t_max, self.nt)

    def with_(self, **kw) -> RunConfig:
        return replace(self, **kw)


_INT_KEYS = {"nx", "nt", "aleph_wiring", "stride"}
_FLOAT_KEYS = {"x_min", "x_max", "t_min", "t_max", "epsilon", "m0", "data_width"}


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse a flat ``key = value`` document; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "c_list":
                values[key] = tuple(float(v) for v in value.split(",") if v.strip())
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    cfg = replace(base or RunConfig(), **values)
    if cfg.scheme != "rk4_mol":
        raise ConfigError(f"unsupported scheme {cfg.scheme!r}")
    if cfg.aleph_wiring not in (1, -1):
        raise ConfigError("aleph_wiring must be +1 or -1")
    if cfg.data_psi not in ("zero", "x") or not cfg.data_width > 0:
        raise ConfigError("data_psi must be zero or x and data_width positive")
    try:
        cfg.grid()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())
