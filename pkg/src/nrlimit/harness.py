"""Experiment drivers: c-sweeps with rate fits, forced and natural-scale runs,
classical trajectories, the order table and the example1 data bundle."""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from . import diffop
from .coeffs import CoefficientSet, preset
from .core import (
    ComplexField,
    RunConfig,
    SpaceTimeGrid,
    WeightSpec,
    emit_csv,
    make_grid,
    weighted_norm,
)
from .dft import dft_forward, fft, frequencies
from .free_kg import (
    error_expansion_term,
    free_data,
    free_evolve,
    greens_convolve_extrapolated,
    schrodinger_free,
)
from .kg_solver import KGProblem, solve_kg
from .observables import error_field, four_current, nr_current, zitterbewegung
from .schrodinger import (
    SchrodingerProblem,
    assemble_ansatz,
    effective_potential,
    schrodinger_dt,
    solve_schrodinger,
    split_cauchy_data,
)

__all__ = [
    "ERROR_WINDOW",
    "GREENS_BOX",
    "CSweepReport",
    "ClassicalPath",
    "c_sweep",
    "classical_trajectory",
    "coeffs_from_config",
    "fit_rate",
    "free_expansion_table",
    "gaussian_data",
    "greens_check",
    "greens_forcing",
    "pipeline",
    "preset_normal_operators",
    "run_example1",
    "run_forced",
    "run_natural",
    "smooth_bump",
    "verify_orders",
    "wiring_sweeps",
]

ERROR_WINDOW = (-5.0, 5.0, 0.0, 2.0)  # (x_lo, x_hi, t_lo, t_hi)
METRICS = ("sup_err", "weighted_err", "sup_err_dtu", "sup_err_dxu", "rho_err", "j_sub_err", "j_raw_err")
FLOOR = 1e-12


# ------------------------------------------------------------------ rates

def fit_rate(cs, errs) -> tuple[float, tuple[float, float]]:
    """Least-squares slope of log(err) against log(c) with a +-2 stderr band."""
    cs = np.asarray(cs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    if cs.size < 3 or cs.size != errs.size:
        raise ValueError("need at least three (c, err) pairs")
    if np.any(errs <= 0) or np.any(cs <= 0):
        raise ValueError("errors and c values must be positive")
    res = stats.linregress(np.log(cs), np.log(errs))
    slope = float(res.slope)
    se = float(res.stderr) if np.isfinite(res.stderr) else 0.0
    return slope, (slope - 2 * se, slope + 2 * se)


@dataclass
class CSweepReport:
    c_values: list
    errors: dict
    fitted_slope: float = math.nan
    slope_ci: tuple = (math.nan, math.nan)
    metric: str = "sup_err"
    band: tuple | None = None
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.c_values, self.c_values[1:])):
            raise ValueError("c values must be strictly increasing")
        if len(self.c_values) >= 3 and math.isnan(self.fitted_slope):
            self.fitted_slope, self.slope_ci = self.slope(self.metric)

    def series(self, metric: str) -> list:
        return [self.errors[c][metric] for c in self.c_values]

    def slope(self, metric: str) -> tuple[float, tuple[float, float]]:
        pairs = [(c, e) for c, e in zip(self.c_values, self.series(metric)) if e > FLOOR]
        dropped = len(self.c_values) - len(pairs)
        if dropped:
            self.notes.append(f"{metric}: {dropped} value(s) below {FLOOR:g} left out of the fit")
        if len(pairs) < 3:
            return math.nan, (math.nan, math.nan)
        return fit_rate(*zip(*pairs))

    @property
    def passed(self) -> bool | None:
        if self.band is None:
            return None
        return bool(self.band[0] <= self.fitted_slope <= self.band[1])

    def rows(self) -> list:
        keys = ("sup_err", "weighted_err", "sup_err_dtu", "sup_err_dxu")
        return [{"c": float(c), **{k: float(self.errors[c].get(k, math.nan)) for k in keys}} for c in self.c_values]


# ------------------------------------------------------------------- data

def smooth_bump(s):
    """``exp(-1/(1-s^2))`` on ``|s| < 1``, exactly zero outside."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1
    out[m] = np.exp(-1.0 / (1.0 - s[m] ** 2))
    return out


def gaussian_data(x, width: float = 1.0, psi_kind: str = "zero"):
    """``phi = exp(-(x/width)^2)``; ``psi`` is zero or ``(x/width) phi``."""
    phi = np.exp(-((x / width) ** 2))
    psi = np.zeros_like(phi) if psi_kind == "zero" else (x / width) * phi
    return phi, psi


def coeffs_from_config(cfg: RunConfig) -> CoefficientSet:
    shapes = {"V": cfg.coef_V, "A": cfg.coef_A, "W": cfg.coef_W, "aleph": cfg.coef_aleph}
    return preset(cfg.preset, m0=cfg.m0, shapes=shapes)


# --------------------------------------------------------------- pipeline

@dataclass
class Branches:
    problems: dict
    v: dict
    dtv: dict


def solve_branches(cs: CoefficientSet, grid: SpaceTimeGrid, ics: dict | None = None, forcing: dict | None = None, support: str = "cauchy", aleph_wiring: int = 1) -> Branches:
    problems, v, dtv = {}, {}, {}
    for s in (1, -1):
        p = SchrodingerProblem(
            s, cs, grid,
            ic=None if ics is None else ics[s],
            forcing=None if forcing is None else forcing[s],
            support=support,
            aleph_wiring=aleph_wiring,
        )
        problems[s] = p
        v[s] = solve_schrodinger(p)
        dtv[s] = schrodinger_dt(p, v[s])
    return Branches(problems, v, dtv)


def cauchy_branches(cs, grid, phi, psi, aleph_wiring: int = 1) -> Branches:
    pp, pm = split_cauchy_data(phi, psi)
    return solve_branches(cs, grid, {1: pp, -1: pm}, aleph_wiring=aleph_wiring)


def _sup(field_: ComplexField | np.ndarray, grid: SpaceTimeGrid, window) -> float:
    x_lo, x_hi, t_lo, t_hi = window
    tm, xm = grid.window_mask(x_lo, x_hi, t_lo, t_hi)
    data = field_.data if isinstance(field_, ComplexField) else field_
    return float(np.abs(data[np.ix_(tm, xm)]).max())


def pipeline(cs: CoefficientSet, c: float, grid: SpaceTimeGrid, branches: Branches, phi=None, psi=None, forcing=None, support: str = "cauchy", window=ERROR_WINDOW, epsilon: float = 0.1, keep: bool = False) -> dict:
    """One KG solve compared against the assembled ansatz; returns error metrics.

    With ``keep`` the solution, ansatz and currents are returned as well.
    """
    sol = solve_kg(KGProblem(cs, c, grid, phi=phi, psi=psi, forcing=forcing, support=support))
    an = assemble_ansatz(branches.v[-1], branches.v[1], c, branches.dtv[-1], branches.dtv[1])
    diff = error_field(sol.u, an.v)
    out = {
        "sup_err": _sup(diff, grid, window),
        "weighted_err": weighted_norm(diff, WeightSpec("spacetime_weighted", epsilon), window),
        "sup_err_dtu": _sup(error_field(sol.u, an.v, "inv_c2_dt", c, sol.dtu, an.inv_c2_dtv), grid, window),
        "sup_err_dxu": _sup(error_field(sol.u, an.v, "dx"), grid, window),
        "sup_u": _sup(sol.u, grid, window),
        "domain_warning": sol.domain_warning,
    }
    cur = four_current(sol.u, sol.dtu, c)
    cl = nr_current(branches.v[-1], branches.v[1])
    zb = zitterbewegung(branches.v[-1], branches.v[1], c)
    out["rho_err"] = _sup(cur.rho - cl.rho, grid, window)
    out["j_sub_err"] = _sup(cur.j - zb - cl.j, grid, window)
    out["j_raw_err"] = _sup(cur.j - cl.j, grid, window)
    if keep:
        out.update(solution=sol, ansatz=an, current=cur, classical=cl, zb=zb)
    return out


def _sweep_worker(args):
    cfg, c = args
    return c, _sweep_serial(cfg, [c])[c]


def _sweep_serial(cfg: RunConfig, c_values, branches: Branches | None = None, scale: Callable | None = None) -> dict:
    cs = coeffs_from_config(cfg)
    grid = cfg.grid()
    phi, psi = sweep_data(cfg, grid.x)
    if branches is None:
        branches = cauchy_branches(cs.frozen(), grid, phi, psi, cfg.aleph_wiring)
    out = {}
    for c in c_values:
        cs_c = cs if scale is None else cs.scaled(scale)
        out[c] = pipeline(cs_c, c, grid, branches, phi, psi, epsilon=cfg.epsilon)
    return out


def sweep_data(cfg: RunConfig, x):
    """Initial data used by sweeps: ``exp(-x^2)``, ``psi = 0`` unless overridden."""
    return gaussian_data(x, cfg.data_width, cfg.data_psi)


def c_sweep(cfg: RunConfig, jobs: int = 1, band=(-2.4, -1.6), scale: Callable | None = None, metric: str = "sup_err") -> CSweepReport:
    """Full pipeline for every c of ``cfg.c_list``; slope fitted on ``metric``.

    ``scale(inv_c)`` multiplies V, producing an artificial O(1/c) coefficient.
    """
    c_values = sorted(float(c) for c in cfg.c_list)
    if jobs > 1 and scale is None:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            errors = dict(ex.map(_sweep_worker, [(cfg, c) for c in c_values]))
    else:
        errors = _sweep_serial(cfg, c_values, scale=scale)
    notes = [f"domain warning at c={c}" for c in c_values if errors[c]["domain_warning"]]
    return CSweepReport(c_values, errors, metric=metric, band=band, notes=notes)


# ---------------------------------------------------------------- example1

def run_example1(cfg: RunConfig, c_values=(1.0, 3.0, 6.0), out_dir: str | None = None, x_stride: int = 4) -> dict:
    """Fields behind the example1 figures, one CSV per c.

    Columns: t, x, re_u, im_u, re_v, im_v, re_err, im_err, abs_vp2, abs_vm2,
    rho, rho_cl, j, j_zb, j_cl.
    """
    cs = coeffs_from_config(cfg)
    grid = cfg.grid()
    phi, psi = sweep_data(cfg, grid.x)
    branches = cauchy_branches(cs.frozen(), grid, phi, psi, cfg.aleph_wiring)
    out_dir = Path(out_dir or cfg.out_dir)
    bundle = {}
    for c in c_values:
        r = pipeline(cs, c, grid, branches, phi, psi, epsilon=cfg.epsilon, keep=True)
        r["non_asymptotic"] = r["sup_err"] > 0.1 * r["sup_u"]
        u, v = r["solution"].u.data, r["ansatz"].v.data
        ti = np.arange(0, grid.nt, max(1, cfg.stride))
        xi = np.arange(0, grid.nx, x_stride)
        T, X = np.meshgrid(grid.t[ti], grid.x[xi], indexing="ij")
        sel = np.ix_(ti, xi)
        cols = {
            "t": T, "x": X,
            "re_u": u.real[sel], "im_u": u.imag[sel],
            "re_v": v.real[sel], "im_v": v.imag[sel],
            "re_err": (u - v).real[sel], "im_err": (u - v).imag[sel],
            "abs_vp2": np.abs(branches.v[1].data[sel]) ** 2,
            "abs_vm2": np.abs(branches.v[-1].data[sel]) ** 2,
            "rho": r["current"].rho[sel], "rho_cl": r["classical"].rho[sel],
            "j": r["current"].j[sel], "j_zb": r["zb"][sel], "j_cl": r["classical"].j[sel],
        }
        names = list(cols)
        table = np.column_stack([cols[k].ravel() for k in names])
        r["csv"] = emit_csv(table.tolist(), out_dir / f"example1_c{c:g}.csv", names)
        bundle[c] = r
    return bundle


# ------------------------------------------------------------------ forced

def forcing_pair(kind: str = "default"):
    """Smooth compactly supported ``f_+, f_-`` living in ``t in [0.2, 0.8]``."""
    def f_plus(t, x):
        return smooth_bump((t - 0.5) / 0.3) * np.exp(-np.asarray(x, dtype=float) ** 2) * (1.0 + 0j)

    def f_minus(t, x):
        return 0.5j * smooth_bump((t - 0.5) / 0.3) * np.exp(-((np.asarray(x, dtype=float) + 1.0) ** 2))

    return f_plus, f_minus


def run_forced(cfg: RunConfig, band=(-math.inf, -0.8), fpm=None) -> CSweepReport:
    """Retarded problems ``P u = F`` with ``F = exp(-ic^2t) f_- + exp(ic^2t) f_+``
    against ``N(P_pm) v_pm = f_pm``."""
    cs = coeffs_from_config(cfg)
    grid = cfg.grid()
    f_plus, f_minus = fpm or forcing_pair()
    branches = solve_branches(cs.frozen(), grid, forcing={1: f_plus, -1: f_minus}, support="retarded", aleph_wiring=cfg.aleph_wiring)
    errors = {}
    for c in sorted(float(c) for c in cfg.c_list):
        c2 = c * c

        def F(t, x, c2=c2):
            return np.exp(-1j * c2 * t) * f_minus(t, x) + np.exp(1j * c2 * t) * f_plus(t, x)

        errors[c] = pipeline(cs, c, grid, branches, forcing=F, support="retarded", epsilon=cfg.epsilon)
    return CSweepReport(sorted(errors), errors, band=band)


def greens_forcing(t, x):
    """Compact smooth forcing in ``[0.25, 1.25] x [-1, 1]`` used for Green's-function checks."""
    return smooth_bump((np.asarray(t, dtype=float) - 0.75) / 0.5) * smooth_bump(x) * (1.0 + 0j)


GREENS_BOX = (-1.2, 1.2, 0.2, 1.3)


@dataclass
class GreensCheck:
    rel_l2: float
    convolution: ComplexField
    kg: ComplexField


def greens_check(c: float = 2.0, h: float = 0.02) -> GreensCheck:
    """Extrapolated Green's-function convolution against a retarded KG run.

    The KG run uses ``[-10, 10] x [0, 3]`` with dx = 0.01; the comparison
    window is ``[-8, 8] x [0, 3]`` sampled every 0.1.
    """
    from .coeffs import free

    fine = make_grid(-10.0, 10.0, 2001, 0.0, 3.0, 301)
    out = make_grid(-8.0, 8.0, 161, 0.0, 3.0, 31)
    sol = solve_kg(KGProblem(free(), c, fine, forcing=greens_forcing, support="retarded"))
    ti = np.rint((out.t - fine.t_min) / fine.dt).astype(int)
    xi = np.rint((out.x - fine.x_min) / fine.dx).astype(int)
    kg = ComplexField(out, sol.u.data[np.ix_(ti, xi)])
    conv = greens_convolve_extrapolated(greens_forcing, c, out, GREENS_BOX, h)
    rel = float(np.linalg.norm(conv.data - kg.data) / np.linalg.norm(kg.data))
    return GreensCheck(rel, conv, kg)


# ----------------------------------------------------------------- natural

def natural_reference(phi_fn: Callable, psi_fn: Callable, T: float, n: int = 1024, dx: float = 0.05):
    """``u0`` at c = 1 as an evaluator ``u0(t, x)`` (natural coordinates).

    Uses the exact spectral solution on a periodic window and evaluates the
    trigonometric interpolant at arbitrary points by a direct mode sum.
    """
    x0 = -n * dx / 2
    xs = x0 + dx * np.arange(n)
    fd = free_data(phi_fn(xs), psi_fn(xs), dx, 1.0)
    xi = frequencies(n, dx)

    def u0(t: float, x) -> np.ndarray:
        up, um = free_evolve(fd, t)
        coef = fft(up + um) / n  # trigonometric interpolation coefficients
        x = np.asarray(x, dtype=float)
        return np.exp(1j * np.outer(x - x0, xi)) @ coef

    return u0


def run_natural(cfg: RunConfig, c_values=(2.0, 3.0, 4.0, 6.0), T: float = 1.0, points_per_unit: int = 20, half_width: float = 10.0, band=(-1.5, -0.5)) -> CSweepReport:
    """Dilated data ``phi(c x)``, ``c^2 psi(c x)`` on ``t in [0, T/c^2]`` compared with
    the rescaled c = 1 free solution ``u0(c^2 t, c x)``."""
    cs = coeffs_from_config(cfg)
    width = cfg.data_width
    phi_fn = lambda x: np.exp(-((x / width) ** 2))
    psi_fn = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    u0 = natural_reference(phi_fn, psi_fn, T)
    errors = {}
    nx = int(2 * half_width * points_per_unit) + 1
    for c in c_values:
        dx = 2 * half_width / (c * (nx - 1))
        if dx > 0.1 / c + 1e-15:
            raise ValueError(f"natural grid too coarse at c={c}: dx={dx:.3g} > 0.1/c")
        grid = make_grid(-half_width / c, half_width / c, nx, 0.0, T / c**2, 41)
        xn = grid.x * c
        sol = solve_kg(KGProblem(cs, c, grid, phi=phi_fn(xn), psi=psi_fn(xn)))
        ref = np.array([u0(c * c * t, xn) for t in grid.t])
        ref[:, 0] = ref[:, -1] = 0.0
        w = np.abs(sol.u.data - ref)
        errors[c] = {"sup_err": float(w.max()), "domain_warning": sol.domain_warning}
    return CSweepReport(list(c_values), errors, band=band)


def natural_floor(cfg: RunConfig, c: float = 2.0, T: float = 1.0, half_width: float = 10.0, points_per_unit: int = 20) -> float:
    """Self-convergence estimate ``|u_h - u_{h/2}|`` of the natural-scale KG solve."""
    cs = coeffs_from_config(cfg)
    width = cfg.data_width
    sols = []
    for ppu in (points_per_unit, 2 * points_per_unit):
        nx = int(2 * half_width * ppu) + 1
        grid = make_grid(-half_width / c, half_width / c, nx, 0.0, T / c**2, 41)
        xn = grid.x * c
        sols.append(solve_kg(KGProblem(cs, c, grid, phi=np.exp(-((xn / width) ** 2)), psi=np.zeros(nx))).u.data)
    return float(np.abs(sols[0] - sols[1][:, ::2]).max())


# ------------------------------------------------------------- trajectories

@dataclass(frozen=True)
class ClassicalPath:
    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray


def classical_trajectory(branch: int, coeffs: CoefficientSet | None, x0: float, xi0: float, t_range=(0.0, 1.5), dt: float = 1e-3, potential: Callable | None = None, window: float = 10.0, aleph_wiring: int = 1) -> ClassicalPath:
    """RK4 for ``x' = xi``, ``xi' = -d_x V_eff(t, x)`` with a centered-difference gradient."""
    V = potential or effective_potential(coeffs.frozen(), branch, aleph_wiring)
    h = 1e-4

    def force(t, x):
        xs = np.array([x - h, x + h])
        vals = np.asarray(V(t, xs), dtype=float)
        return -(vals[1] - vals[0]) / (2 * h)

    t0, t1 = t_range
    n = max(1, int(math.ceil((t1 - t0) / dt - 1e-12)))
    step = (t1 - t0) / n
    ts = t0 + step * np.arange(n + 1)
    xs = np.empty(n + 1)
    ps = np.empty(n + 1)
    x, p = float(x0), float(xi0)
    xs[0], ps[0] = x, p
    for i in range(n):
        t = ts[i]
        k1x, k1p = p, force(t, x)
        k2x, k2p = p + step / 2 * k1p, force(t + step / 2, x + step / 2 * k1x)
        k3x, k3p = p + step / 2 * k2p, force(t + step / 2, x + step / 2 * k2x)
        k4x, k4p = p + step * k3p, force(t + step, x + step * k3x)
        x += step / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        p += step / 6 * (k1p + 2 * k2p + 2 * k3p + k4p)
        if abs(x) > 10 * window:
            raise FloatingPointError(f"trajectory left |x| <= {10 * window} at t={ts[i + 1]}")
        xs[i + 1], ps[i + 1] = x, p
    return ClassicalPath(ts, xs, ps)


# ------------------------------------------------------------------- orders

def verify_orders() -> dict:
    """Golden membership table plus the free normal operators."""
    rows = diffop.golden_table()
    p0 = diffop.box() - diffop.inv_c(-2)
    lap_free = {
        s: diffop.normal_operator(p0, s) == (diffop.d_t().scale(diffop.Q(0, -2 * s)) + diffop.d_x(2))
        for s in (1, -1)
    }
    return {"rows": rows, "free_normal": lap_free}


def preset_normal_operators(cs: CoefficientSet) -> dict:
    """``N(P_pm)`` of the Klein-Gordon operator restricted to the active coefficients."""
    op = diffop.kg_operator(*(cs.active(n) for n in ("V", "A", "W", "aleph")), freeze=diffop.freeze_map(cs))
    return {s: diffop.normal_operator(op, s) for s in (1, -1)}


# ------------------------------------------------------------------ wiring

def wiring_sweeps(cfg: RunConfig | None = None) -> dict:
    """gravity_bump sweeps under both aleph wirings, plus the symbolic wiring.

    Returns ``{"sweeps": {+1: report, -1: report}, "symbolic": w}`` where
    ``w`` is read off ``N(P_+)`` of ``Box - c^2 + c^-4 aleph d_t^2``.
    """
    cfg = cfg or RunConfig(preset="gravity_bump")
    sweeps = {w: c_sweep(cfg.with_(aleph_wiring=w)) for w in (1, -1)}
    op = diffop.box() - diffop.inv_c(-2) + diffop.compose(diffop.compose(diffop.inv_c(4), diffop.coef("aleph")), diffop.d_t(2))
    w = diffop.aleph_wiring(diffop.normal_operator(op, 1))
    return {"sweeps": sweeps, "symbolic": int(2 * w)}


# ------------------------------------------------------- free expansion

def free_expansion_table(c_values=(4.0, 6.0, 8.0, 12.0), t_values=None, n: int = 4096, dx: float = 0.01, width: float = 2.0, terms: int = 3) -> dict:
    """Residuals of ``exp(-+ic^2t) u_pm - v_pm - sum_{k<=K} c^-2k E_k`` for K = 0..terms.

    Data: ``phi = exp(-(x/w)^2)``, ``psi = (x/w) phi`` on a periodic window.
    Returns ``{K: [sup residual per c]}`` with the sup taken over both
    branches, all ``t_values`` and the window.
    """
    t_values = np.linspace(0.0, 1.0, 21) if t_values is None else np.asarray(t_values)
    x = (np.arange(n) - n // 2) * dx
    phi, psi = gaussian_data(x, width, "x")
    phi_hat, psi_hat = dft_forward(phi + 0j, dx), dft_forward(psi + 0j, dx)
    inf_data = {s: phi_hat.with_coefficients((phi_hat.coefficients - s * 1j * psi_hat.coefficients) / 2) for s in (1, -1)}
    Es = {(s, k, i): error_expansion_term(k, inf_data[s], psi_hat, s, t) for s in (1, -1) for k in range(1, terms + 1) for i, t in enumerate(t_values)}
    table = {K: [] for K in range(terms + 1)}
    for c in c_values:
        fd = free_data(phi, psi, dx, c)
        worst = np.zeros(terms + 1)
        for i, t in enumerate(t_values):
            up, um = free_evolve(fd, t)
            for s, u in ((1, up), (-1, um)):
                r = np.exp(-s * 1j * c * c * t) * u - schrodinger_free(inf_data[s], s, t)
                worst[0] = max(worst[0], np.abs(r).max())
                for k in range(1, terms + 1):
                    r = r - c ** (-2 * k) * Es[(s, k, i)]
                    worst[k] = max(worst[k], np.abs(r).max())
        for K in range(terms + 1):
            table[K].append(float(worst[K]))
    return table
