import random
from fractions import Fraction

import numpy as np
import pytest

from nrlimit import diffop as D
from nrlimit.coeffs import example1
from nrlimit.diffop import I, MultiOrder, Q


def _rand_const_op(rng: random.Random, nterms: int = 3) -> D.DiffOp:
    op = D.DiffOp()
    for _ in range(nterms):
        j, k, p = rng.randint(0, 2), rng.randint(0, 2), rng.randint(-2, 4)
        coeff = Q(Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5)))
        if not coeff:
            coeff = Q(Fraction(1))
        op = op + D.compose(D.compose(D.inv_c(p), D.d_t(j)), D.d_x(k)).scale(coeff)
    if op.is_zero:
        op = D.d_x()
    return op


def test_compose_constant():
    dxx = D.compose(D.d_x(), D.d_x())
    assert dxx == D.d_x(2)
    assert D.multi_order(dxx) == MultiOrder(2, 0, 2, 0, 0)
    a = D.compose(D.inv_c(2), D.d_t())
    assert D.compose(a, a) == D.compose(D.inv_c(4), D.d_t(2))


def test_order_additivity_random():
    rng = random.Random(5)
    for _ in range(100):
        a, b = _rand_const_op(rng), _rand_const_op(rng)
        assert D.multi_order(D.compose(a, b)) == D.multi_order(a) + D.multi_order(b)


def test_order_of_sum_is_join():
    a = D.compose(D.inv_c(4), D.d_t(2))
    b = D.compose(D.inv_c(3), D.compose(D.d_t(), D.d_x()))
    assert D.multi_order(a + b) == D.multi_order(a).join(D.multi_order(b))


def test_conjugate_single():
    a = D.compose(D.inv_c(2), D.d_t())
    assert D.conjugate(a, 1) == a + D.const(I)
    assert D.conjugate(a, -1) == a - D.const(I)


def test_conjugated_free_operator_loses_mass():
    p0 = D.box() - D.inv_c(-2)
    for s in (1, -1):
        conj = D.conjugate(p0, s)
        assert all(not (m.j == m.k == 0 and not m.symbols) for m in conj.terms)
        expected = D.compose(D.inv_c(2), D.d_t(2)).scale(-1) + D.d_t().scale(Q(0, Fraction(-2 * s))) + D.d_x(2)
        assert conj == expected


def test_double_conjugation_round_trip():
    rng = random.Random(9)
    for _ in range(20):
        a = _rand_const_op(rng, 4)
        assert D.conjugate(D.conjugate(a, 1), -1) == a
        assert D.conjugate(D.conjugate(a, -1), 1) == a


def test_conjugation_homomorphism():
    rng = random.Random(3)
    for _ in range(20):
        a, b = _rand_const_op(rng), _rand_const_op(rng)
        for s in (1, -1):
            assert D.conjugate(D.compose(a, b), s) == D.compose(D.conjugate(a, s), D.conjugate(b, s))


def test_normal_operator_multiplicative():
    a = D.box() - D.inv_c(-2)
    b = D.d_x() + D.const(2)
    for s in (1, -1):
        lhs = D.normal_operator(D.compose(a, b), s)
        assert lhs == D.compose(D.normal_operator(a, s), D.normal_operator(b, s))


def test_box_order():
    assert D.multi_order(D.box() - D.inv_c(-2)) == MultiOrder(2, 0, 2, 0, 0)


def test_paper_orders():
    assert D.multi_order(D.compose(D.inv_c(4), D.d_t(2))) == MultiOrder(2, 0, 0, 0, 0)
    assert D.multi_order(D.compose(D.inv_c(3), D.compose(D.d_t(), D.d_x()))) == MultiOrder(2, 0, 0, -1, -1)
    assert D.multi_order(D.d_x()) == MultiOrder(1, 0, 1, 0, 0)


def test_metric_perturbation_orders():
    # the aleph term survives at the parabolic face (it feeds -aleph into N(P_pm))
    assert D.multi_order(D.boxg_minus_box()) == MultiOrder(2, -1, 0, 0, 0)
    rest = D.boxg_minus_box() - D.compose(D.compose(D.inv_c(4), D.coef("aleph")), D.d_t(2))
    assert D.multi_order(rest) == MultiOrder(2, -1, 0, -1, -1)
    assert D.multi_order(D.p_minus_p1()).le(MultiOrder(2, -1, 1, -1, -1))


def test_golden_table_shape():
    rows = D.golden_table()
    assert [r[0] for r in rows] == [g[0] for g in D.GOLDEN]
    assert sum(r[3] for r in rows) == 3


def test_free_normal_operator():
    p0 = D.box() - D.inv_c(-2)
    for s in (1, -1):
        assert D.normal_operator(p0, s) == D.d_t().scale(Q(0, Fraction(-2 * s))) + D.d_x(2)


def test_normal_operator_with_aleph():
    p = D.box() - D.inv_c(-2) + D.compose(D.compose(D.inv_c(4), D.coef("aleph")), D.d_t(2))
    for s in (1, -1):
        n = D.normal_operator(p, s)
        assert n == D.d_t().scale(Q(0, Fraction(-2 * s))) + D.d_x(2) - D.coef("aleph")
        assert D.aleph_wiring(n) == Fraction(1, 2)


def test_full_normal_operator_matches_schrodinger_form():
    p = D.kg_operator()
    A = D.coef("A")
    idxA = D.d_x().scale(I) + A
    for s in (1, -1):
        n = D.normal_operator(p, s)
        # -2 (s i d_t + (i d_x + A)^2/2 + V_eff), V_eff = -s V - W/2 + aleph/2
        v_eff = D.coef("V").scale(-s) - D.coef("W").scale(Fraction(1, 2)) + D.coef("aleph").scale(Fraction(1, 2))
        inner = D.d_t().scale(Q(0, Fraction(s))) + D.compose(idxA, idxA).scale(Fraction(1, 2)) + v_eff
        assert n == inner.scale(-2)
        assert all(m.p == 0 for m in n.terms)


def test_example_normal_operator():
    n = D.normal_operator(D.kg_operator(A=False, W=False, aleph=False), 1, D.freeze_map(example1()))
    assert n == D.d_t().scale(Q(0, Fraction(-2))) + D.d_x(2) + D.coef("V").scale(2)
    vterm = next(m for m in n.terms if m.symbols)
    assert vterm.symbols[0].evaluate(0.0, np.array([1.0]))[0] == pytest.approx(8.0)


def test_growth_rejected():
    with pytest.raises(ValueError, match="parabolic"):
        D.normal_operator(D.d_t(), 1)


def test_leibniz_on_symbols():
    out = D.compose(D.d_x(), D.coef("V"))
    labels = sorted((m.k, m.symbols[0].derivs, m.symbols[0].bf_decay) for m in out.terms)
    assert labels == [(0, (0, 1), -2), (1, (0, 0), -1)]


def test_zero_removed():
    assert (D.d_x() - D.d_x()).is_zero
    with pytest.raises(ValueError):
        D.multi_order(D.DiffOp())
