import itertools
import math

import numpy as np
import pytest

from nrlimit.coeffs import example1, free
from nrlimit.core import ComplexField, make_grid
from nrlimit.harness import cauchy_branches, pipeline
from nrlimit.kg_solver import KGProblem, solve_kg
from nrlimit.observables import error_field, four_current, nr_current, zitterbewegung
from nrlimit.stencils import d1

RNG = np.random.default_rng(8)


def _field(g, data):
    return ComplexField(g, np.asarray(data, dtype=complex))


def test_real_field_has_no_current():
    g = make_grid(-5, 5, 101, 0, 1, 11)
    u = _field(g, RNG.normal(size=(11, 101)))
    cur = four_current(u, _field(g, RNG.normal(size=(11, 101))), 2.0)
    assert np.all(cur.rho == 0) and np.all(cur.j == 0)


def test_plane_wave_current():
    c = 2.0
    # k dx small enough that the central difference is within 1e-6
    g = make_grid(0, 2 * math.pi, 8001, 0, 1, 11)
    k = 1.0
    omega = c * math.sqrt(k * k + c * c)
    X, T = np.meshgrid(g.x, g.t)
    u = np.exp(1j * (k * X - omega * T))
    cur = four_current(_field(g, u), _field(g, -1j * omega * u), c)
    inner = slice(1, -1)
    assert np.abs(cur.rho - (-omega / c**2)).max() < 1e-6
    assert np.abs(cur.j[:, inner] - k).max() < 1e-6


def test_conservation_second_order():
    res = []
    for nx, nt in ((401, 201), (801, 401), (1601, 801)):
        g = make_grid(-10, 10, nx, 0, 1, nt)
        sol = solve_kg(KGProblem(free(), 2.0, g, phi=np.exp(-(g.x**2) + 1j * g.x), psi=np.zeros(nx)))
        cur = four_current(sol.u, sol.dtu, 2.0)
        dtr = (cur.rho[2:] - cur.rho[:-2]) / (2 * g.dt)
        dxj = d1(cur.j[1:-1] + 0j, g.dx).real
        r = (dtr - dxj)[:, 1:-1]
        res.append(math.sqrt((r**2).sum() * g.dx * g.dt))
    for a, b in itertools.pairwise(res):
        assert 3.2 <= a / b <= 4.8


def test_nr_current_examples():
    g = make_grid(0, 2 * math.pi, 2001, 0, 1, 3)
    v = _field(g, RNG.normal(size=(3, 2001)) + 1j * RNG.normal(size=(3, 2001)))
    assert np.all(nr_current(v, v).rho == 0)
    k = 3.0
    wave = _field(g, np.tile(np.exp(1j * k * g.x), (3, 1)))
    zero = _field(g, np.zeros((3, 2001)))
    cur = nr_current(zero, wave)
    assert np.abs(cur.rho - 1).max() < 1e-14
    assert np.abs(cur.j[:, 1:-1] - k).max() < 1e-4


def test_zitterbewegung_needs_both_branches():
    g = make_grid(-5, 5, 51, 0, 1, 5)
    v = _field(g, RNG.normal(size=(5, 51)) + 1j * RNG.normal(size=(5, 51)))
    zero = _field(g, np.zeros((5, 51)))
    assert np.all(zitterbewegung(v, zero, 3.0) == 0)
    assert np.all(zitterbewegung(zero, v, 3.0) == 0)
    assert zitterbewegung(v, v, 3.0).dtype == float


def test_current_splits_into_branches_and_interference():
    # j(v) = j_cl + j_zb for the assembled ansatz
    c = 3.0
    g = make_grid(-5, 5, 201, 0, 1, 11)
    vm = _field(g, RNG.normal(size=(11, 201)) + 1j * RNG.normal(size=(11, 201)))
    vp = _field(g, RNG.normal(size=(11, 201)) + 1j * RNG.normal(size=(11, 201)))
    t = g.t[:, None]
    v = np.exp(-1j * c * c * t) * vm.data + np.exp(1j * c * c * t) * vp.data
    j_full = np.imag(np.conj(v) * d1(v, g.dx))
    assert np.abs(j_full - nr_current(vm, vp).j - zitterbewegung(vm, vp, c)).max() < 1e-10


def test_error_field_examples():
    g = make_grid(-5, 5, 51, 0, 1, 5)
    u = _field(g, RNG.normal(size=(5, 51)) + 1j * RNG.normal(size=(5, 51)))
    assert np.all(error_field(u, u).data == 0)
    lin = _field(g, np.tile(2.0 * g.x, (5, 1)))
    zero = _field(g, np.zeros((5, 51)))
    assert np.abs(error_field(lin, zero, "dx").data[:, 1:-1] - 2).max() < 1e-12
    with pytest.raises(ValueError):
        error_field(u, u, "inv_c2_dt")
    with pytest.raises(ValueError):
        error_field(u, u, "dt")
    other = make_grid(-5, 5, 52, 0, 1, 5)
    with pytest.raises(ValueError):
        error_field(u, _field(other, np.zeros((5, 52))))


def test_gauge_invariance():
    g = make_grid(-5, 5, 201, 0, 1, 5)
    u = _field(g, RNG.normal(size=(5, 201)) + 1j * RNG.normal(size=(5, 201)))
    du = _field(g, RNG.normal(size=(5, 201)) + 1j * RNG.normal(size=(5, 201)))
    ph = np.exp(0.7j)
    a, b = four_current(u, du, 2.0), four_current(u.scale(ph), du.scale(ph), 2.0)
    assert np.abs(a.rho - b.rho).max() < 1e-14 and np.abs(a.j - b.j).max() < 1e-12


def test_rho_error_decays_in_c():
    g = make_grid(-10, 10, 2001, 0, 2, 41)
    phi = np.exp(-(g.x**2))
    psi = np.zeros(g.nx)
    br = cauchy_branches(example1(), g, phi, psi)
    errs = []
    for c in (3.0, 6.0):
        m = pipeline(example1(), c, g, br, phi, psi)
        errs.append(m["rho_err"])
    assert errs[1] < errs[0]
