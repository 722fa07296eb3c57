"""Command-line entry point: ``python -m nrlimit <subcommand>``.

Exit status 0 when every asserted band holds, 1 when one is violated,
2 on configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness as H
from .core import SWEEP_COLUMNS, ConfigError, RunConfig, emit_csv, load_config
from .dft import dft_forward
from .free_kg import (
    error_expansion_term,
    free_data,
    free_evolve,
    greens_1d,
    schrodinger_free,
)
from .kg_solver import KGProblem, solve_kg
from .observables import four_current, nr_current, zitterbewegung
from .schrodinger import SchrodingerProblem, solve_schrodinger, split_cauchy_data

OK, BAND, CONFIG = 0, 1, 2


def _field_rows(grid, data, stride: int, names=("re_u", "im_u")):
    ti = np.arange(0, grid.nt, max(1, stride))
    T, X = np.meshgrid(grid.t[ti], grid.x, indexing="ij")
    d = data[ti]
    return np.column_stack([T.ravel(), X.ravel(), d.real.ravel(), d.imag.ravel()]).tolist(), ["t", "x", *names]


def _report(name: str, rep: H.CSweepReport, out: Path) -> int:
    path = emit_csv(rep.rows(), out / f"{name}.csv", SWEEP_COLUMNS)
    lo, hi = rep.slope_ci
    print(f"{name}: slope {rep.fitted_slope:.3f} (ci {lo:.3f}..{hi:.3f}) band {rep.band} -> {'ok' if rep.passed else 'VIOLATED'}")
    for n in rep.notes:
        print(f"  note: {n}")
    print(f"  wrote {path}")
    return OK if rep.passed in (True, None) else BAND


def cmd_example1(cfg, args, out):
    bundle = H.run_example1(cfg, out_dir=out)
    for c, r in bundle.items():
        flag = " (non-asymptotic regime)" if r["non_asymptotic"] else ""
        print(f"c={c:g}: sup|u-v| = {r['sup_err']:.4g}, sup|u| = {r['sup_u']:.4g}{flag} -> {r['csv']}")
    return OK


def cmd_sweep(cfg, args, out):
    rep = H.c_sweep(cfg, jobs=args.jobs)
    code = _report("sweep", rep, out)
    errs = rep.series("sup_err")
    if any(b >= a for a, b in zip(errs, errs[1:])):
        print("  sup_err is not strictly decreasing in c")
        code = BAND
    return code


def cmd_forced(cfg, args, out):
    return _report("forced", H.run_forced(cfg), out)


def cmd_natural(cfg, args, out):
    rep = H.run_natural(cfg, T=args.T)
    code = _report("natural", rep, out)
    ctrl = H.run_natural(cfg.with_(preset="free"), T=args.T, band=None)
    floor = H.natural_floor(cfg.with_(preset="free"), T=args.T)
    worst = max(ctrl.series("sup_err"))
    print(f"  free control: max error {worst:.3g}, self-convergence floor {floor:.3g}")
    if worst > 10 * floor:
        code = BAND
    return code


def cmd_trajectory(cfg, args, out):
    cs = H.coeffs_from_config(cfg)
    path = H.classical_trajectory(args.branch, cs, args.x0, args.xi0, (cfg.t_min, cfg.t_max), aleph_wiring=cfg.aleph_wiring)
    rows = np.column_stack([path.times, path.positions, path.momenta]).tolist()
    print(f"wrote {emit_csv(rows, out / 'trajectory.csv', ['t', 'x', 'xi'])}")
    return OK


def cmd_orders(cfg, args, out):
    res = H.verify_orders()
    code = OK
    for name, got, want, exact, member in res["rows"]:
        print(f"{name:14s} computed {got.astuple()} expected {want.astuple()} exact={exact} member={member}")
        code = code if exact else BAND
    for s, ok in res["free_normal"].items():
        print(f"N(P0{'+' if s > 0 else '-'}) = {'-' if s > 0 else '+'}2i d_t + d_x^2: {ok}")
        code = code if ok else BAND
    for s, op in H.preset_normal_operators(H.coeffs_from_config(cfg)).items():
        print(f"{cfg.preset}: N(P{'+' if s > 0 else '-'}) = {op}")
    return code


def cmd_free(cfg, args, out):
    """Spectral u, the c-trend table of the expansion residuals, and E_k snapshots."""
    cs = sorted(float(c) for c in cfg.c_list)
    table = H.free_expansion_table(cs)
    rows = [{"c": c, **{f"resid_{K}": table[K][i] for K in table}} for i, c in enumerate(cs)]
    print(f"wrote {emit_csv(rows, out / 'free_trend.csv', ['c', *(f'resid_{K}' for K in table)])}")
    for K in table:
        slope, (lo, hi) = H.fit_rate(cs, table[K])
        print(f"  residual after {K} term(s): slope {slope:.3f} ({lo:.3f}..{hi:.3f})")
    n, dx = 4096, 0.01
    x = (np.arange(n) - n // 2) * dx
    phi, psi = H.gaussian_data(x, 2.0, "x")
    phi_hat, psi_hat = dft_forward(phi + 0j, dx), dft_forward(psi + 0j, dx)
    sel = np.abs(x) <= 10.0
    for c in cs:
        fd = free_data(phi, psi, dx, c)
        recs = []
        for t in np.linspace(cfg.t_min, cfg.t_max, 5):
            up, um = free_evolve(fd, t)
            cols = [np.full(sel.sum(), t), x[sel], up[sel], um[sel]]
            for s in (1, -1):
                inf = phi_hat.with_coefficients((phi_hat.coefficients - s * 1j * psi_hat.coefficients) / 2)
                cols.append(schrodinger_free(inf, s, t)[sel])
                cols += [error_expansion_term(k, inf, psi_hat, s, t)[sel] for k in (1, 2, 3)]
            recs.append(np.column_stack([cols[0], cols[1]] + [f for z in cols[2:] for f in (z.real, z.imag)]))
        names = ["t", "x"] + [f"{p}_{n_}" for n_ in ("up", "um", "vp", "E1p", "E2p", "E3p", "vm", "E1m", "E2m", "E3m") for p in ("re", "im")]
        print(f"c={c:g}: wrote {emit_csv(np.vstack(recs).tolist(), out / f'free_c{c:g}.csv', names)}")
    return OK


def cmd_greens(cfg, args, out):
    """G_+ samples plus the convolution-versus-solver comparison."""
    c = args.c
    ts, xs = np.meshgrid(np.linspace(-0.5, 2.0, 26), np.linspace(-5.0, 5.0, 101), indexing="ij")
    G = greens_1d(ts, xs, c)
    print(f"wrote {emit_csv(np.column_stack([ts.ravel(), xs.ravel(), G.ravel()]).tolist(), out / f'greens_kernel_c{c:g}.csv', ['t', 'x', 'G'])}")
    chk = H.greens_check(c)
    g = chk.kg.grid
    T, X = np.meshgrid(g.t, g.x, indexing="ij")
    a, b = chk.convolution.data, chk.kg.data
    rows = np.column_stack([T.ravel(), X.ravel(), a.real.ravel(), a.imag.ravel(), b.real.ravel(), b.imag.ravel()]).tolist()
    path = emit_csv(rows, out / f"greens_c{c:g}.csv", ["t", "x", "re_conv", "im_conv", "re_kg", "im_kg"])
    ok = chk.rel_l2 <= 0.02
    print(f"relative L2 (convolution vs KG) = {chk.rel_l2:.4f} band <= 0.02 -> {'ok' if ok else 'VIOLATED'}; wrote {path}")
    return OK if ok else BAND


def _cauchy_data(cfg):
    grid = cfg.grid()
    return grid, *H.sweep_data(cfg, grid.x)


def cmd_kg(cfg, args, out):
    grid, phi, psi = _cauchy_data(cfg)
    cs = H.coeffs_from_config(cfg)
    for c in cfg.c_list:
        sol = solve_kg(KGProblem(cs, c, grid, phi=phi, psi=psi, scheme=cfg.scheme))
        rows, cols = _field_rows(grid, sol.u.data, cfg.stride)
        print(f"c={c:g}: wrote {emit_csv(rows, out / f'kg_c{c:g}.csv', cols)}" + (" (boundary warning)" if sol.domain_warning else ""))
    return OK


def cmd_schrodinger(cfg, args, out):
    grid, phi, psi = _cauchy_data(cfg)
    cs = H.coeffs_from_config(cfg).frozen()
    pp, pm = split_cauchy_data(phi, psi)
    for s, ic in ((1, pp), (-1, pm)):
        v = solve_schrodinger(SchrodingerProblem(s, cs, grid, ic=ic, aleph_wiring=cfg.aleph_wiring))
        rows, cols = _field_rows(grid, v.data, cfg.stride, ("re_v", "im_v"))
        tag = "plus" if s > 0 else "minus"
        print(f"branch {tag}: wrote {emit_csv(rows, out / f'schrodinger_{tag}.csv', cols)}")
    return OK


def cmd_current(cfg, args, out):
    grid, phi, psi = _cauchy_data(cfg)
    cs = H.coeffs_from_config(cfg)
    b = H.cauchy_branches(cs.frozen(), grid, phi, psi, cfg.aleph_wiring)
    for c in cfg.c_list:
        sol = solve_kg(KGProblem(cs, c, grid, phi=phi, psi=psi))
        cur, cl = four_current(sol.u, sol.dtu, c), nr_current(b.v[-1], b.v[1])
        zb = zitterbewegung(b.v[-1], b.v[1], c)
        ti = np.arange(0, grid.nt, max(1, cfg.stride))
        T, X = np.meshgrid(grid.t[ti], grid.x, indexing="ij")
        cols = {"t": T, "x": X, "rho": cur.rho[ti], "rho_cl": cl.rho[ti], "j": cur.j[ti], "j_zb": zb[ti], "j_cl": cl.j[ti]}
        rows = np.column_stack([v.ravel() for v in cols.values()]).tolist()
        print(f"c={c:g}: wrote {emit_csv(rows, out / f'current_c{c:g}.csv', list(cols))}")
    return OK


COMMANDS = {
    "example1": cmd_example1,
    "sweep": cmd_sweep,
    "forced": cmd_forced,
    "natural": cmd_natural,
    "trajectory": cmd_trajectory,
    "orders": cmd_orders,
    "free": cmd_free,
    "greens": cmd_greens,
    "kg": cmd_kg,
    "schrodinger": cmd_schrodinger,
    "current": cmd_current,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nrlimit", description="Non-relativistic limit experiments for Klein-Gordon.")
    ap.add_argument("--config", type=Path, help="key=value run configuration")
    ap.add_argument("--out", type=Path, help="output directory (overrides out_dir)")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for c-sweeps")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "trajectory":
            p.add_argument("--branch", type=int, choices=(1, -1), default=-1)
            p.add_argument("--x0", type=float, default=0.0)
            p.add_argument("--xi0", type=float, default=0.0)
        if name == "natural":
            p.add_argument("--T", type=float, default=1.0)
        if name == "greens":
            p.add_argument("--c", type=float, default=2.0)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        out = Path(args.out or cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args, out)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG


if __name__ == "__main__":
    sys.exit(main())
