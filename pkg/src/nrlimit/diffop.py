"""Exact algebra of c-dependent differential operators in 1+1 dimensions.

An operator is a finite sum of monomials

    coeff * s_1(t,x) * ... * s_r(t,x) * c^(-p) * d_t^j * d_x^k

with ``coeff`` an exact complex rational and ``s_i`` symbolic coefficient
functions (only their spacetime decay and their c = infinity values are
tracked).  Coefficients act by multiplication on the left.

Conventions: ``Box = -c^-2 d_t^2 + d_x^2`` and ``Lap = -d_x^2`` (positive
Laplacian), so the free operator is ``P0 = Box - c^2``.

Multi-order of a monomial (df, bf, nat, pf):

* ``df = j + k``
* ``bf = sum of the symbols' decay orders``
* ``nat = k + 2 j - p``
* ``pf = -p``, read off after conjugating by ``exp(+-i c^2 t)``

The operator order is the componentwise max over monomials; the pf entries
are computed on the conjugated operator after exact cancellation.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

__all__ = [
    "DiffOp",
    "Monomial",
    "MultiOrder",
    "Q",
    "Symbol",
    "aleph_wiring",
    "box",
    "coef",
    "compose",
    "conjugate",
    "const",
    "d_t",
    "d_x",
    "golden_table",
    "inv_c",
    "kg_operator",
    "multi_order",
    "normal_operator",
]


# ------------------------------------------------------------ exact scalars

@dataclass(frozen=True)
class Q:
    """Exact complex rational ``re + i im``."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(v) -> Q:
        if isinstance(v, Q):
            return v
        if isinstance(v, complex):
            return Q(Fraction(v.real).limit_denominator(10**12), Fraction(v.imag).limit_denominator(10**12))
        return Q(Fraction(v))

    def __add__(self, o):
        o = Q.of(o)
        return Q(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return Q(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-Q.of(o))

    def __mul__(self, o):
        o = Q.of(o)
        return Q(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return f"{self.im}i"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}i)"


I = Q(Fraction(0), Fraction(1))


def _ipow(sign: int, n: int) -> Q:
    """``(sign * i)^n`` exactly."""
    out = Q(Fraction(1))
    for _ in range(n):
        out = out * Q(Fraction(0), Fraction(sign))
    return out


# -------------------------------------------------------------- symbols

@dataclass(frozen=True)
class Symbol:
    """A coefficient function known only by its decay order and c=inf value.

    ``derivs = (a, b)`` marks ``d_t^a d_x^b`` of the base function; each
    derivative lowers ``bf_decay`` by one.
    """

    name: str
    bf_decay: int = -1
    derivs: tuple = (0, 0)
    freeze: Callable | None = field(default=None, compare=False, hash=False, repr=False)

    @property
    def label(self) -> str:
        a, b = self.derivs
        pre = ("d_t" * a) + ("d_x" * b)
        return f"{pre}{'(' if pre else ''}{self.name}{')' if pre else ''}"

    def differentiate(self, a: int, b: int) -> Symbol:
        if a == b == 0:
            return self
        da, db = self.derivs
        return Symbol(self.name, self.bf_decay - a - b, (da + a, db + b), self.freeze)

    def evaluate(self, t: float, x, h: float = 1e-4):
        """Value at c = infinity; derivatives by nested centered differences."""
        if self.freeze is None:
            raise ValueError(f"symbol {self.label} has no c=inf evaluator")
        return _fd(self.freeze, t, np.asarray(x, dtype=float), *self.derivs, h)


def _fd(f, t, x, a, b, h):
    if a:
        return (_fd(f, t + h, x, a - 1, b, h) - _fd(f, t - h, x, a - 1, b, h)) / (2 * h)
    if b:
        return (_fd(f, t, x + h, a, b - 1, h) - _fd(f, t, x - h, a, b - 1, h)) / (2 * h)
    return f(t, x)


# ------------------------------------------------------------- monomials

@dataclass(frozen=True)
class Monomial:
    j: int
    k: int
    p: int
    coeff: Q = Q(Fraction(1))
    symbols: tuple = ()

    @property
    def key(self):
        return (self.j, self.k, self.p, self.symbols)

    def order(self) -> tuple:
        return (self.j + self.k, sum(s.bf_decay for s in self.symbols), self.k + 2 * self.j - self.p)

    def __str__(self):
        parts = [repr(self.coeff)]
        parts += [s.label for s in self.symbols]
        if self.p:
            parts.append(f"c^{-self.p}")
        if self.j:
            parts.append("d_t" + (f"^{self.j}" if self.j > 1 else ""))
        if self.k:
            parts.append("d_x" + (f"^{self.k}" if self.k > 1 else ""))
        return "*".join(parts)


def _sort_symbols(symbols: Iterable[Symbol]) -> tuple:
    return tuple(sorted(symbols, key=lambda s: (s.name, s.derivs, s.bf_decay)))


@dataclass(frozen=True)
class DiffOp:
    terms: tuple = ()
    normalized: bool = False

    def normalize(self) -> DiffOp:
        acc: dict = {}
        sym_of: dict = {}
        for m in self.terms:
            acc[m.key] = acc.get(m.key, Q()) + m.coeff
            sym_of.setdefault(m.key, m.symbols)
        terms = tuple(
            Monomial(key[0], key[1], key[2], c, sym_of[key])
            for key, c in sorted(acc.items(), key=lambda kv: _sort_key(kv[0]))
            if c
        )
        return DiffOp(terms, True)

    def __add__(self, other: DiffOp) -> DiffOp:
        return DiffOp(self.terms + other.terms).normalize()

    def __neg__(self) -> DiffOp:
        return self.scale(-1)

    def __sub__(self, other: DiffOp) -> DiffOp:
        return self + (-other)

    def __mul__(self, other: DiffOp) -> DiffOp:
        return compose(self, other)

    def scale(self, q) -> DiffOp:
        q = Q.of(q)
        return DiffOp(tuple(Monomial(m.j, m.k, m.p, m.coeff * q, m.symbols) for m in self.terms)).normalize()

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        a, b = self.normalize(), other.normalize()
        return [(m.key, m.coeff) for m in a.terms] == [(m.key, m.coeff) for m in b.terms]

    def __hash__(self):
        return hash(tuple((m.key, m.coeff) for m in self.normalize().terms))

    def __str__(self):
        return " + ".join(str(m) for m in self.terms) if self.terms else "0"

    @property
    def is_zero(self) -> bool:
        return not self.normalize().terms


def _sort_key(key):
    j, k, p, syms = key
    return (p, -j, -k, tuple((s.name, s.derivs) for s in syms))


# ----------------------------------------------------------- constructors

def const(q=1) -> DiffOp:
    return DiffOp((Monomial(0, 0, 0, Q.of(q)),)).normalize()


def inv_c(n: int = 1) -> DiffOp:
    """Multiplication by ``c^-n`` (negative ``n`` gives positive powers)."""
    return DiffOp((Monomial(0, 0, n),)).normalize()


def d_t(n: int = 1) -> DiffOp:
    return DiffOp((Monomial(n, 0, 0),)).normalize()


def d_x(n: int = 1) -> DiffOp:
    return DiffOp((Monomial(0, n, 0),)).normalize()


def coef(name: str, bf_decay: int = -1, freeze: Callable | None = None) -> DiffOp:
    """Multiplication by a symbolic coefficient function."""
    return DiffOp((Monomial(0, 0, 0, Q(Fraction(1)), (Symbol(name, bf_decay, (0, 0), freeze),)),)).normalize()


# ------------------------------------------------------------- algebra

def _compose_mono(a: Monomial, b: Monomial) -> list:
    """``a o b`` with the Leibniz rule for derivatives hitting b's symbols."""
    out = []
    nb = len(b.symbols)
    # distribute d_t^j d_x^k of a across b's symbols and b's derivative
    for split_t in _compositions(a.j, nb + 1):
        for split_x in _compositions(a.k, nb + 1):
            mult = _multinomial(a.j, split_t) * _multinomial(a.k, split_x)
            syms = [s.differentiate(st, sx) for s, st, sx in zip(b.symbols, split_t, split_x)]
            out.append(
                Monomial(
                    split_t[-1] + b.j,
                    split_x[-1] + b.k,
                    a.p + b.p,
                    a.coeff * b.coeff * mult,
                    _sort_symbols(a.symbols + tuple(syms)),
                )
            )
    return out


def _compositions(n: int, parts: int):
    """All ways to write n as an ordered sum of ``parts`` nonnegative ints."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def _multinomial(n: int, split) -> int:
    out, left = 1, n
    for s in split:
        out *= comb(left, s)
        left -= s
    return out


def compose(a: DiffOp, b: DiffOp) -> DiffOp:
    terms = []
    for ma, mb in itertools.product(a.normalize().terms, b.normalize().terms):
        terms.extend(_compose_mono(ma, mb))
    return DiffOp(tuple(terms)).normalize()


def conjugate(a: DiffOp, sign: int) -> DiffOp:
    """``exp(-sign i c^2 t) a exp(+sign i c^2 t)``: substitute d_t -> d_t + sign i c^2."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    terms = []
    for m in a.normalize().terms:
        for r in range(m.j + 1):
            # d_t^r (sign i c^2)^(j-r)
            terms.append(
                Monomial(r, m.k, m.p - 2 * (m.j - r), m.coeff * comb(m.j, r) * _ipow(sign, m.j - r), m.symbols)
            )
    return DiffOp(tuple(terms)).normalize()


@dataclass(frozen=True, order=True)
class MultiOrder:
    m: int
    s: int
    l: int
    q_plus: int
    q_minus: int

    def __add__(self, o: MultiOrder) -> MultiOrder:
        return MultiOrder(self.m + o.m, self.s + o.s, self.l + o.l, self.q_plus + o.q_plus, self.q_minus + o.q_minus)

    def join(self, o: MultiOrder) -> MultiOrder:
        return MultiOrder(*(max(u, v) for u, v in zip(self.astuple(), o.astuple())))

    def le(self, o: MultiOrder) -> bool:
        return all(u <= v for u, v in zip(self.astuple(), o.astuple()))

    def astuple(self) -> tuple:
        return (self.m, self.s, self.l, self.q_plus, self.q_minus)

    def __str__(self):
        return f"({self.m},{self.s},{self.l};{self.q_plus},{self.q_minus})"


def _pf(a: DiffOp, sign: int) -> int:
    conj = conjugate(a, sign)
    return max(-m.p for m in conj.terms)


def multi_order(a: DiffOp) -> MultiOrder:
    a = a.normalize()
    if not a.terms:
        raise ValueError("the zero operator has no finite order")
    df, bf, nat = (max(col) for col in zip(*(m.order() for m in a.terms)))
    return MultiOrder(df, bf, nat, _pf(a, 1), _pf(a, -1))


def normal_operator(a: DiffOp, sign: int, freeze: dict | None = None) -> DiffOp:
    """Leading part of ``conjugate(a, sign)`` at the parabolic face.

    Keeps the monomials of pf order 0 (no power of c).  ``freeze`` maps a
    symbol name to its c = infinity evaluator ``f(t, x)``; symbols that
    already carry one keep it.
    """
    conj = conjugate(a, sign)
    if max(-m.p for m in conj.terms) > 0:
        raise ValueError("operator grows at the parabolic face; rescale by a power of 1/c first")
    freeze = freeze or {}
    terms = []
    for m in conj.terms:
        if m.p != 0:
            continue
        syms = tuple(
            Symbol(s.name, s.bf_decay, s.derivs, freeze.get(s.name, s.freeze)) for s in m.symbols
        )
        terms.append(Monomial(m.j, m.k, 0, m.coeff, syms))
    return DiffOp(tuple(terms)).normalize()


def freeze_map(cs) -> dict:
    """c = infinity evaluators for the symbols used by :func:`kg_operator`."""
    return {
        "V": lambda t, x: cs.V(t, x, 0.0),
        "A": lambda t, x: cs.A(t, x, 0.0),
        "W": lambda t, x: cs.W(t, x, 0.0),
        "aleph": cs.aleph,
    }


def aleph_wiring(n_op: DiffOp, sign: int = 1) -> Fraction:
    """Coefficient ``w`` such that the normal operator carries ``-2 * w * aleph``.

    Writing ``N(P_sign) = -2 (sign i d_t - d_x^2/2 + V_eff)``, an aleph term
    ``q * aleph`` in ``N`` contributes ``V_eff += (-q/2) aleph``.
    """
    for m in n_op.normalize().terms:
        if m.j == m.k == 0 and len(m.symbols) == 1 and m.symbols[0].name == "aleph" and m.symbols[0].derivs == (0, 0):
            if m.coeff.im:
                raise ValueError("aleph enters with a complex coefficient")
            return -m.coeff.re / 2
    return Fraction(0)


# ------------------------------------------------------ standard operators

def box() -> DiffOp:
    """Flat ``Box = -c^-2 d_t^2 + d_x^2``."""
    return compose(inv_c(2), d_t(2)).scale(-1) + d_x(2)


def kg_operator(V: bool = True, A: bool = True, W: bool = True, aleph: bool = True, freeze: dict | None = None) -> DiffOp:
    """``-c^-2 (d_t + iV)^2 - (i d_x + A)^2 - c^2 + W + c^-4 aleph d_t^2``."""
    freeze = freeze or {}
    zero = DiffOp()
    sV = coef("V", -1, freeze.get("V")) if V else zero
    sA = coef("A", -1, freeze.get("A")) if A else zero
    sW = coef("W", -1, freeze.get("W")) if W else zero
    dtV = d_t() + sV.scale(I)
    idxA = d_x().scale(I) + sA
    op = compose(inv_c(2), compose(dtV, dtV)).scale(-1)
    op = op - compose(idxA, idxA) - inv_c(-2) + sW
    if aleph:
        op = op + compose(compose(inv_c(4), coef("aleph", -1, freeze.get("aleph"))), d_t(2))
    return op.normalize()


def boxg_minus_box() -> DiffOp:
    """Metric perturbation: aleph c^-4 d_t^2 plus the suppressed S^-1 terms."""
    g = lambda name: coef(name, -1)
    op = compose(compose(inv_c(4), g("aleph")), d_t(2))
    op = op + compose(compose(inv_c(5), g("g_tt")), d_t(2))
    op = op + compose(compose(inv_c(3), g("g_tx")), compose(d_t(), d_x()))
    op = op + compose(compose(inv_c(2), g("g_xx")), d_x(2))
    return op


def p_minus_p1() -> DiffOp:
    """``P - P1`` for a generic operator whose coefficients carry O(1/c) parts.

    ``P1`` keeps Box, the aleph term, the mass and the c = infinity parts of
    beta, B, W, so the difference consists of the suppressed metric terms and
    ``c^-1`` times S^-1 corrections to ``i beta c^-2 d_t + i B d_x + W``.
    """
    g = lambda name: coef(name, -1)
    op = boxg_minus_box() - compose(compose(inv_c(4), g("aleph")), d_t(2))
    op = op + compose(compose(inv_c(3), g("beta1")), d_t()).scale(I)
    op = op + compose(compose(inv_c(1), g("B1")), d_x()).scale(I)
    op = op + compose(inv_c(1), g("W1"))
    return op


GOLDEN = [
    ("Box_g - Box", boxg_minus_box, MultiOrder(2, -1, 0, -2, -2)),
    ("c^-4 d_t^2", lambda: compose(inv_c(4), d_t(2)), MultiOrder(2, 0, 0, 0, 0)),
    ("c^-3 d_t d_x", lambda: compose(inv_c(3), compose(d_t(), d_x())), MultiOrder(2, 0, 0, -1, -1)),
    ("P - P1", p_minus_p1, MultiOrder(2, -1, 1, -1, -1)),
    ("d_x", d_x, MultiOrder(1, 0, 1, 0, 0)),
]


def golden_table() -> list:
    """Rows ``(name, computed, expected, exact, member)``.

    ``member`` means the computed order is componentwise at most the
    expected one (class inclusion); ``exact`` means equality.
    """
    rows = []
    for name, build, expected in GOLDEN:
        got = multi_order(build())
        rows.append((name, got, expected, got == expected, got.le(expected)))
    return rows
