"""Acceptance criteria A1-A10.

Each test prints one ``A<n> PASS|FAIL`` line with the measured quantities.
Run ``python tests/test_acceptance.py`` for the summary without pytest.
"""

import functools
import itertools

import numpy as np
import pytest

from nrlimit import harness as H
from nrlimit.coeffs import example1, free
from nrlimit.core import RunConfig, make_grid
from nrlimit.dft import dft_forward, dft_inverse
from nrlimit.free_kg import free_data, free_evolve, greens_1d
from nrlimit.kg_solver import KGProblem, solve_kg
from nrlimit.schrodinger import (
    SchrodingerProblem,
    solve_schrodinger,
    split_cauchy_data,
    split_delta_forcing,
)

BAND2 = (-2.4, -1.6)


def _in(x, band):
    return bool(band[0] <= x <= band[1])


@functools.cache
def example1_sweep():
    return H.c_sweep(RunConfig(preset="example1", c_list=(3.0, 4.0, 6.0, 8.0)))


def check_a1():
    rep = example1_sweep()
    s = rep.fitted_slope
    errs = ", ".join(f"{e:.3g}" for e in rep.series("sup_err"))
    return _in(s, BAND2), f"sup|u-v| slope {s:.3f} (band {BAND2}); errors {errs}"


def check_a2():
    rep = example1_sweep()
    st, sx = rep.slope("sup_err_dtu")[0], rep.slope("sup_err_dxu")[0]
    return _in(st, BAND2) and _in(sx, BAND2), f"c^-2 d_t slope {st:.3f}, d_x slope {sx:.3f} (band {BAND2})"


def check_a3():
    cs = (4.0, 6.0, 8.0, 12.0)
    table = H.free_expansion_table(cs)
    s0, s1 = H.fit_rate(cs, table[0])[0], H.fit_rate(cs, table[1])[0]
    ok = abs(s0 + 2) <= 0.2 and abs(s1 + 4) <= 0.4
    return ok, f"raw slope {s0:.3f} (-2 +- 0.2), with E1 {s1:.3f} (-4 +- 0.4)"


def check_a4():
    chk = H.greens_check(2.0)
    c = 2.0
    t = np.linspace(-1.0, 2.0, 61)[:, None]
    x = np.linspace(-5.0, 5.0, 201)[None, :]
    G = greens_1d(t, x, c)
    support = bool(np.all(G[np.broadcast_to(t <= 0, G.shape)] == 0) and np.all(G[np.abs(x) > c * np.abs(t)] == 0))
    parity = bool(np.array_equal(G, greens_1d(t, -x, c)))
    ok = chk.rel_l2 <= 0.02 and support and parity
    return ok, f"relative L2 {chk.rel_l2:.4f} (<= 0.02), support {support}, parity {parity}"


def check_a5():
    e = example1_sweep().errors
    r_rho = e[3.0]["rho_err"] / e[6.0]["rho_err"]
    r_sub = e[3.0]["j_sub_err"] / e[6.0]["j_sub_err"]
    r_raw = e[3.0]["j_raw_err"] / e[6.0]["j_raw_err"]
    ok = r_rho >= 3 and r_sub >= 3 and 1 / 3 < r_raw < 3
    return ok, f"rho ratio {r_rho:.2f} (>= 3), j-j_zb-j_cl ratio {r_sub:.2f} (>= 3), j-j_cl ratio {r_raw:.2f} (within 3)"


def check_a6():
    res = H.wiring_sweeps()
    slopes = {w: rep.fitted_slope for w, rep in res["sweeps"].items()}
    good = [w for w, s in slopes.items() if _in(s, BAND2)]
    ok = len(good) == 1 and good[0] == res["symbolic"]
    return ok, f"slopes +1: {slopes[1]:.3f}, -1: {slopes[-1]:.3f}; in band {good}; symbolic wiring {res['symbolic']:+d}"


def check_a7():
    res = H.verify_orders()
    rows = res["rows"]
    bad = [f"{n}: {g.astuple()} vs {w.astuple()}" for n, g, w, exact, _ in rows if not exact]
    ok = not bad and all(res["free_normal"].values())
    detail = f"{len(rows) - len(bad)}/{len(rows)} tuples exact, N(P0+-) {all(res['free_normal'].values())}"
    return ok, detail + ("; mismatches " + "; ".join(bad) if bad else "")


def check_a8():
    rep = H.run_natural(RunConfig(preset="example1"))
    ctrl = H.run_natural(RunConfig(preset="free"), band=None)
    floor = H.natural_floor(RunConfig(preset="free"))
    worst = max(ctrl.series("sup_err"))
    ok = bool(rep.passed) and worst <= 10 * floor
    return ok, f"example1 slope {rep.fitted_slope:.3f} (band (-1.5, -0.5)); free control {worst:.3g} vs floor {floor:.3g}"


def check_a9():
    res = []
    for nx in (201, 401, 801, 1601):
        g = make_grid(-10, 10, nx, 0, 1, 11)
        res.append(solve_kg(KGProblem(free(), 2.0, g, phi=np.exp(-(g.x**2)), psi=np.zeros(nx))).u.data)
    d = [np.abs(res[i] - res[i + 1][:, ::2]).max() for i in range(3)]
    factors = [a / b for a, b in itertools.pairwise(d)]
    conv = all(3.2 <= f <= 4.8 for f in factors)

    g = make_grid(-10, 10, 2001, 0, 2, 41)
    v = solve_schrodinger(SchrodingerProblem(1, example1(), g, ic=np.exp(-(g.x**2)) / 2))
    norm = np.sqrt(np.sum(np.abs(v.data) ** 2, axis=1) * g.dx)
    drift = float(np.abs(norm - norm[0]).max() / norm[0] / (g.t_max - g.t_min))

    n, dx = 4096, 0.01
    xs = (np.arange(n) - n // 2) * dx
    fd = free_data(np.exp(-(xs**2)) + 0j, xs * np.exp(-(xs**2)) + 0j, dx, 3.0)
    a0 = np.abs(fd.phi_hat_plus.coefficients)
    mod = max(np.abs(np.abs(dft_forward(free_evolve(fd, t)[0], dx).coefficients) - a0).max() for t in (0.5, 2.0)) / a0.max()

    rng = np.random.default_rng(0)
    a = rng.normal(size=1024) + 1j * rng.normal(size=1024)
    s = dft_forward(a, 0.1)
    rt = np.abs(dft_inverse(s) - a).max()
    pars = abs(np.sum(np.abs(a) ** 2) - np.sum(np.abs(s.coefficients) ** 2) / a.size) / np.sum(np.abs(a) ** 2)

    ok = conv and drift < 1e-10 and mod <= 1e-13 and rt <= 1e-12 and pars <= 1e-12
    detail = f"KG factors {', '.join(f'{f:.2f}' for f in factors)}; CN drift {drift:.1e}/unit t; mode modulus {mod:.1e}; DFT round trip {rt:.1e}, Parseval {pars:.1e}"
    return ok, detail


def check_a10():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 64))
        phi, psi = (rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(2))
        p, m = split_cauchy_data(phi, psi)
        worst = max(worst, np.abs(p + m - phi).max(), np.abs((m - p) / 1j - psi).max())
        f, g = (rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(2))
        fp, gp, fm, gm = split_delta_forcing(f, g)
        worst = max(
            worst,
            np.abs(gp + gm - g).max(),
            np.abs(fp + fm + 1j * gm - 1j * gp - f).max(),
            np.abs(fp - 2j * gp).max(),
            np.abs(fm + 2j * gm).max(),
        )
    return worst <= 1e-14, f"worst identity residual {worst:.1e} over 1000 trials (<= 1e-14)"


CHECKS = {f"A{i}": globals()[f"check_a{i}"] for i in range(1, 11)}


@pytest.mark.parametrize("name", list(CHECKS))
def test_acceptance(name, capsys):
    ok, detail = CHECKS[name]()
    with capsys.disabled():
        print(f"\n{name} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


if __name__ == "__main__":
    for name, fn in CHECKS.items():
        ok, detail = fn()
        print(f"{name} {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
