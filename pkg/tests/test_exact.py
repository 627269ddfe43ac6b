from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadcusp.errors import DivisionByZero, NotADiscriminant, ParseError
from quadcusp.exact import (
    PCElem,
    QuadElem,
    antiinv,
    embed_real,
    format_quad,
    parse_pc,
    parse_quad,
    parse_rat,
    format_rat,
    sqrt_interval,
    trp,
)

DISCS = [5, 8, 12, 13, 17, -3, -4, -12, 21, 28]
rats = st.fractions(min_value=-50, max_value=50, max_denominator=12)


@st.composite
def quads(draw, D=None):
    D = D if D is not None else draw(st.sampled_from(DISCS))
    return QuadElem(D, draw(rats), draw(rats))


@st.composite
def quad_pairs(draw):
    D = draw(st.sampled_from(DISCS))
    return draw(quads(D)), draw(quads(D))


@st.composite
def pcs(draw, D=None):
    D = D if D is not None else draw(st.sampled_from([5, 8, 12, 13]))
    return PCElem(draw(quads(D)), draw(rats))


def test_gamma_times_conjugate():
    for D in DISCS:
        g = QuadElem.gamma(D)
        assert g * g.conj() == QuadElem(D, Fraction(D * D - D, 4))


def test_sqrt_squared():
    for D in DISCS:
        assert QuadElem.sqrt(D) ** 2 == QuadElem(D, D)


def test_gamma_norm_for_five():
    # independent: (D^2 - D)/4 at D = 5
    g = QuadElem.gamma(5)
    assert g.norm() == Fraction(25 - 5, 4) == 5
    assert g.trace() == 5


def test_norm_of_one_plus_root_minus_three():
    # 1 + sqrt(-3) = 1 + sqrt(-12)/2 = 7 + gamma_{-12}
    x = QuadElem(-12, 1, Fraction(1, 2))
    assert x == QuadElem.gamma(-12) + 7
    u, v = x.u, x.v
    assert x.norm() == u * u - v * v * (-12) == 4


def test_antiinvariant_part():
    for D in (5, 8, 13):
        assert antiinv(QuadElem.sqrt(D)) == 1
        assert antiinv(QuadElem.gamma(D).conj()) == Fraction(-1, 2)
        assert antiinv(QuadElem(D, Fraction(7, 3))) == 0


@given(quads())
def test_conjugation_is_an_involution(a):
    assert a.conj().conj() == a
    assert a.trace() == (a + a.conj()).u
    assert QuadElem(a.D, a.norm()) == a * a.conj()


@given(quad_pairs())
def test_field_axioms(pair):
    a, b = pair
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b).norm() == a.norm() * b.norm()
    assert (a * b).conj() == a.conj() * b.conj()
    if b:
        assert (a / b) * b == a
    else:
        with pytest.raises(DivisionByZero):
            a / b


def test_bad_discriminants_rejected():
    for D in (0, 2, 3, 4, 9, 16):
        with pytest.raises(NotADiscriminant):
            QuadElem(D, 1)


def test_pseudocubic_unit_and_zero_divisors():
    D = 5
    x = PCElem(QuadElem(D, 3, 2), Fraction(7))
    assert x * PCElem.one(D) == x
    left = PCElem(QuadElem(D, 2, 1), 0)
    right = PCElem(QuadElem(D), 5)
    assert left * right == PCElem.make(D) == right * left
    assert not (left * right)


@given(pcs())
def test_sigma_involution_and_trace(a):
    assert a.sigma().sigma() == a
    assert trp(a) == a.x.trace() + a.q


def test_pseudo_trace_values():
    D = 13
    assert trp(PCElem.make(D, 1, 0, 1)) == 3
    assert trp(PCElem.make(D, 0, 1, 0)) == 0
    assert trp(PCElem(QuadElem.gamma(D), 5)) == D + 5


def test_real_embeddings():
    x = PCElem(QuadElem(5, 1, 3), 7)
    third = embed_real(x, 3, 64)
    assert third.lo == third.hi == 7
    I = embed_real(PCElem.make(5, 0, 1), 1, 80)
    assert I.lo > 0 and I.lo**2 <= 5 <= I.hi**2
    assert I.width <= Fraction(1, 2**70)
    s = embed_real(x, 1, 64) + embed_real(x, 2, 64)
    assert s.contains(x.x.trace())
    assert s.width <= Fraction(1, 2**60)


@given(st.integers(min_value=2, max_value=10**6), st.integers(min_value=8, max_value=100))
@settings(max_examples=60)
def test_sqrt_interval_brackets_root(n, bits):
    I = sqrt_interval(n, bits)
    assert I.lo >= 0 and I.lo * I.lo <= n <= I.hi * I.hi
    assert I.width <= Fraction(1, 2**bits)
    assert math.isqrt(n) <= I.hi


@given(quads())
def test_quadratic_format_roundtrip(a):
    assert parse_quad(format_quad(a), a.D) == a


@given(pcs())
def test_pseudocubic_format_roundtrip(a):
    assert parse_pc(str(a), a.D) == a


def test_parse_grammar():
    assert parse_quad("3 - 2*sqrt(5)", 5) == QuadElem(5, 3, -2)
    assert parse_quad("1/2 + g", 8) == QuadElem(8, Fraction(9, 2), Fraction(1, 2))
    assert parse_rat(" -7/21 ") == Fraction(-1, 3)
    assert format_rat(Fraction(6, 4)) == "3/2"
    for bad in ("", "sqrt(", "1 + 2*x"):
        with pytest.raises(ParseError):
            parse_quad(bad, 5)
    with pytest.raises(ParseError):
        parse_pc("(1, 2)", 5)
