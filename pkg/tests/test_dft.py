import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from nrlimit.dft import (
    PeriodicityWarning,
    boundary_guard,
    dft_forward,
    dft_inverse,
    fft,
    fourier_multiplier,
    frequencies,
    ifft,
    spectral_derivative,
)

RNG = np.random.default_rng(11)


def _random(n):
    return RNG.normal(size=n) + 1j * RNG.normal(size=n)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 64, 1024])
def test_fft_matches_numpy(n):
    a = _random(n)
    assert np.allclose(fft(a), np.fft.fft(a), rtol=0, atol=1e-12 * max(1, n))
    assert np.allclose(ifft(a), np.fft.ifft(a), rtol=0, atol=1e-12)


def test_frequencies_match_numpy():
    assert np.allclose(frequencies(16, 0.3), 2 * np.pi * np.fft.fftfreq(16, 0.3), rtol=1e-15)


def test_dc_mode():
    s = dft_forward(np.ones(8), 1.0)
    assert s.coefficients[0] == pytest.approx(8)
    assert np.abs(s.coefficients[1:]).max() < 1e-14


def test_pure_mode():
    n = 16
    s = dft_forward(np.exp(2j * np.pi * np.arange(n) / n), 1.0)
    assert s.coefficients[1] == pytest.approx(n)
    assert np.abs(np.delete(s.coefficients, 1)).max() < 1e-13


@settings(max_examples=30)
@given(st.integers(0, 12))
def test_round_trip_and_parseval(p):
    a = _random(2**p)
    s = dft_forward(a, 0.1)
    assert np.abs(dft_inverse(s) - a).max() < 1e-12 * max(1.0, np.abs(a).max())
    assert np.sum(np.abs(a) ** 2) == pytest.approx(np.sum(np.abs(s.coefficients) ** 2) / a.size, rel=1e-12)


def test_non_power_of_two():
    with pytest.raises(ValueError, match="power of two"):
        dft_forward(np.ones(6), 1.0)
    assert dft_forward(np.ones(6), 1.0, pad=True).n == 8


def test_linearity():
    a, b = _random(256), _random(256)
    m = lambda xi: 1.0 / (1.0 + xi**2)
    lhs = fourier_multiplier(2 * a - 3j * b, 0.05, m)
    rhs = 2 * fourier_multiplier(a, 0.05, m) - 3j * fourier_multiplier(b, 0.05, m)
    assert np.abs(lhs - rhs).max() < 1e-12
    assert np.abs(spectral_derivative(a + b, 0.05, 2) - spectral_derivative(a, 0.05, 2) - spectral_derivative(b, 0.05, 2)).max() < 1e-12 * 4e3


def test_multiplier_identity_and_composition():
    a = _random(512)
    assert np.abs(fourier_multiplier(a, 0.1, lambda xi: np.ones_like(xi)) - a).max() < 1e-12
    m1 = lambda xi: np.exp(-(xi**2) / 50)
    m2 = lambda xi: 2.0 / np.sqrt(xi**2 + 4.0)
    two = fourier_multiplier(fourier_multiplier(a, 0.1, m1), 0.1, m2)
    one = fourier_multiplier(a, 0.1, lambda xi: m1(xi) * m2(xi))
    assert np.abs(two - one).max() < 1e-12


def test_multiplier_differentiates_mode():
    n, dx = 128, 20 / 128
    xi0 = frequencies(n, dx)[5]
    x = dx * np.arange(n)
    u = np.exp(1j * xi0 * x)
    assert np.abs(fourier_multiplier(u, dx, lambda xi: 1j * xi) - 1j * xi0 * u).max() < 1e-12


def test_multiplier_nan_rejected():
    with pytest.raises(FloatingPointError), np.errstate(divide="ignore"):
        fourier_multiplier(np.ones(8), 1.0, lambda xi: 1.0 / xi)


def test_mass_multiplier_against_quadrature():
    c, n, dx = 2.0, 1024, 40 / 1024
    x = -20 + dx * np.arange(n)
    got = fourier_multiplier(np.exp(-(x**2)), dx, lambda xi: c / np.sqrt(xi**2 + c**2))

    def direct(x0):
        f = lambda xi: c / np.sqrt(xi**2 + c**2) * np.sqrt(np.pi) * np.exp(-(xi**2) / 4) * np.cos(xi * x0)
        return quad(f, 0, 40, epsabs=1e-12, epsrel=1e-12, limit=200)[0] / np.pi

    idx = [0, 400, 480, 512, 530, 600]
    assert max(abs(got[i] - direct(x[i])) for i in idx) < 1e-8


def test_spectral_derivative_sine():
    n, L = 256, 2 * np.pi
    dx = L / n
    x = dx * np.arange(n)
    assert np.abs(spectral_derivative(np.sin(3 * x), dx, 1) - 3 * np.cos(3 * x)).max() < 1e-10
    assert np.abs(spectral_derivative(np.full(n, 2.5), dx, 1)).max() < 1e-13
    assert np.abs(spectral_derivative(np.full(n, 2.5), dx, 2)).max() < 1e-13


def test_spectral_second_derivative_gaussian():
    n = 1024
    dx = 20 / n
    x = -10 + dx * np.arange(n)
    exact = (4 * x**2 - 2) * np.exp(-(x**2))
    assert np.abs(spectral_derivative(np.exp(-(x**2)), dx, 2) - exact).max() < 1e-8


def test_bad_order():
    with pytest.raises(ValueError):
        spectral_derivative(np.ones(8), 1.0, 3)


def test_boundary_guard():
    assert boundary_guard(np.array([0.0, 1.0, 0.0]))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert not boundary_guard(np.array([1e-3, 1.0, 0.0]))
    assert any(issubclass(x.category, PeriodicityWarning) for x in w)
