import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrlimit.core import (
    CONFIG_KEYS,
    SWEEP_COLUMNS,
    ComplexField,
    ConfigError,
    RunConfig,
    WeightSpec,
    emit_csv,
    make_grid,
    parse_config,
    read_csv,
    weighted_norm,
)


def test_default_grid_spacing():
    g = make_grid(-10, 10, 2001, 0, 2, 401)
    assert g.dx == pytest.approx(0.01, abs=1e-15)
    assert g.dt == pytest.approx(0.005, abs=1e-15)


def test_minimal_grid():
    g = make_grid(-10, 10, 3, 0, 0.5, 2)
    assert g.x.tolist() == [-10.0, 0.0, 10.0]
    assert g.t.tolist() == [0.0, 0.5]


@pytest.mark.parametrize("args", [(0, 0, 100, 0, 1, 10), (-1, 1, 2, 0, 1, 10), (-1, 1, 10, 0, 1, 1), (-1, 1, 10, 1, 1, 10)])
def test_bad_grids(args):
    with pytest.raises(ValueError):
        make_grid(*args)


def test_degenerate_message():
    with pytest.raises(ValueError, match="degenerate spatial interval"):
        make_grid(0, 0, 100, 0, 1, 10)


@given(st.floats(-50, 50), st.floats(0.1, 50), st.integers(3, 5000))
def test_last_node_hits_x_max(x0, length, nx):
    g = make_grid(x0, x0 + length, nx, 0, 1, 2)
    assert abs(g.x[-1] - (x0 + length)) <= 4 * np.spacing(max(abs(x0), abs(x0 + length), 1.0))


def _field(value, nx=201, nt=21):
    g = make_grid(-10, 10, nx, 0, 2, nt)
    return ComplexField(g, np.full((nt, nx), value, dtype=complex))


def test_norm_of_zero_and_one():
    assert weighted_norm(_field(0)) == 0.0
    assert weighted_norm(_field(1)) == 1.0
    assert weighted_norm(_field(1), WeightSpec("spacetime_weighted", 0.1)) == pytest.approx(1.0, abs=1e-15)


def test_weighted_sup_is_weight_max_off_origin():
    f = _field(1)
    w = WeightSpec("spacetime_weighted", 0.1)
    assert weighted_norm(f, w, (2.0, 5.0, 1.0, 2.0)) == pytest.approx((1 + 4 + 1) ** -0.85)


def test_l2_of_constant():
    f = _field(1)
    assert weighted_norm(f, WeightSpec(p=2)) == pytest.approx(math.sqrt(20 * 2))


@settings(max_examples=50)
@given(st.complex_numbers(min_magnitude=1e-6, max_magnitude=1e3, allow_nan=False, allow_infinity=False), st.sampled_from(["plain_sup", "spacetime_weighted"]), st.sampled_from([2, math.inf]))
def test_norm_homogeneous(alpha, kind, p):
    rng = np.random.default_rng(0)
    g = make_grid(-3, 3, 31, 0, 1, 11)
    f = ComplexField(g, rng.normal(size=(11, 31)) + 1j * rng.normal(size=(11, 31)))
    w = WeightSpec(kind, 0.1, p)
    assert weighted_norm(f.scale(alpha), w) == pytest.approx(abs(alpha) * weighted_norm(f, w), rel=1e-12, abs=1e-300)


def test_plain_sup_is_exact_max():
    rng = np.random.default_rng(1)
    g = make_grid(-3, 3, 31, 0, 1, 11)
    data = rng.normal(size=(11, 31)) + 1j * rng.normal(size=(11, 31))
    assert weighted_norm(ComplexField(g, data)) == np.abs(data).max()


def test_nan_detected():
    f = _field(1)
    data = f.data.copy()
    data[3, 4] = np.nan
    with pytest.raises(FloatingPointError):
        ComplexField(f.grid, data)


def test_field_is_read_only():
    f = _field(1)
    with pytest.raises(ValueError):
        f.data[0, 0] = 2


def test_weight_spec_validation():
    with pytest.raises(ValueError):
        WeightSpec(epsilon=0)
    with pytest.raises(ValueError):
        WeightSpec(kind="other")


def test_csv_empty_and_one_row(tmp_path):
    p = emit_csv([], tmp_path / "e.csv")
    assert p.read_text().strip().split("\n") == [",".join(SWEEP_COLUMNS)]
    p = emit_csv([{"c": 3.0, "sup_err": 0.1, "weighted_err": 0.2, "sup_err_dtu": 0.3, "sup_err_dxu": 0.4}], tmp_path / "o.csv")
    assert len(p.read_text().strip().split("\n")) == 2


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    vals = rng.normal(size=(7, 5)) * 10.0 ** rng.integers(-12, 12, size=(7, 5))
    p = emit_csv(vals.tolist(), tmp_path / "s.csv", SWEEP_COLUMNS)
    header, back = read_csv(p)
    assert header == list(SWEEP_COLUMNS)
    assert np.allclose(back, vals, rtol=1e-12, atol=0)


def test_csv_io_error_names_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_csv([], blocker / "sub" / "x.csv")


def test_config_parse_and_reject():
    cfg = parse_config("preset = free\nc_list = 2, 3,4 # comment\nnx=101\n")
    assert cfg.preset == "free" and cfg.c_list == (2.0, 3.0, 4.0) and cfg.nx == 101
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("colour = blue")
    with pytest.raises(ConfigError):
        parse_config("nx = many")
    with pytest.raises(ConfigError):
        parse_config("nx = 2")
    with pytest.raises(ConfigError):
        parse_config("scheme = leapfrog")


def test_all_keys_documented():
    for key in ("preset", "x_min", "x_max", "nx", "t_min", "t_max", "nt", "c_list", "scheme", "epsilon", "out_dir"):
        assert CONFIG_KEYS[key]
    assert RunConfig().grid().nx == 2001
