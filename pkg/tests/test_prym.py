from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from quadcusp import prym
from quadcusp.boundary import Weighting, cross_ratio_equations, dual_basis, exponent_lattice, q_map
from quadcusp.errors import DomainError, SquareDiscriminant
from quadcusp.exact import PCElem, QuadElem
from quadcusp.lattices import rank
from quadcusp.oracles import charpoly_faddeev

NON_SQUARE = [n for n in range(1, 51) if math.isqrt(2 * n + 1) ** 2 != 2 * n + 1]


@pytest.mark.parametrize("n", range(1, 51))
def test_char_poly_against_faddeev(n):
    want = [int(c) for c in charpoly_faddeev(prym.an_matrix(n))]
    assert prym.char_poly(n) == want == prym.expected_char_poly(n)
    assert prym.char_poly_check(n)


def test_char_poly_shape():
    assert prym.expected_char_poly(1) == [1, 0, -5, 0, 5, 0, -1]
    for n in (1, 2, 7):
        c = prym.expected_char_poly(n)
        assert c[-1] == -n ** 3 and all(c[i] == 0 for i in range(1, 7, 2))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 11, 30])
def test_eigenvector(n):
    assert all(not r for r in prym.eigen_residual(n))
    assert prym.eigen_checks(n)
    t = prym.root_t(n)
    # (1 + t)^2 = 2(n + 1 + t), the identity behind sqrt2 = (1 + t)/mu
    assert (1 + t) * (1 + t) == 2 * ((n + 1) + t)
    assert t * t == QuadElem(prym.prym_disc(n), 2 * n + 1)


def test_square_discriminant_rejected():
    for n in (4, 12, 24):
        with pytest.raises(SquareDiscriminant):
            prym.prym_data(n)
        with pytest.raises(SquareDiscriminant):
            prym.eigenvector(n)
    with pytest.raises(DomainError):
        prym.prym_data(0)
    with pytest.raises(DomainError):
        prym.prym_data(1, "x")


@given(st.sampled_from(NON_SQUARE[:10]), st.integers(-3, 3), st.integers(-3, 3))
def test_dehn_trace_against_floats(n, k, l):
    tr = prym.dehn_trace(n, k, l)
    mu = math.sqrt(n + 1 + math.sqrt(2 * n + 1))
    ah = [[1, k * mu], [0, 1]]
    av = [[1, 0], [-l * mu, 1]]
    P = [[sum(ah[i][m] * av[m][j] for m in range(2)) for j in range(2)] for i in range(2)]
    D = prym.prym_disc(n)
    val = float(tr.u) + float(tr.v) * math.sqrt(D)
    assert abs(val - (P[0][0] + P[1][1])) < 1e-6 * max(1, abs(val))


def test_dehn_trace_cases():
    for n in NON_SQUARE[:8]:
        assert prym.dehn_trace(n, 0, 5) == 2
        assert prym.dehn_trace(n, 3, 0) == 2
        assert not prym.is_hyperbolic(n, 0, 2)
        for k, l in [(1, 2), (2, 1), (2, 3), (-1, -2)]:
            assert prym.is_hyperbolic(n, k, l)
    # tr = 2 - mu^2 = 1 - t - n  with n = 1: |1 - sqrt3 - 1| < 2, elliptic
    assert prym.dehn_trace(1, 1, 1) == 2 - prym.MuElem.mu(1).mu2
    assert not prym.is_hyperbolic(1, 1, 1)


@pytest.mark.parametrize("sign", ["+", "-"])
def test_prym_data_n1(sign):
    data = prym.prym_data(1, sign)
    e = 1 if sign == "+" else -1
    assert data.D == 12
    r = data.weights
    assert rank([list(w.coords()) for w in r]) == 3
    assert q_map(r[0]) == (6, 1, 6 * e)
    assert q_map(r[1]) == (-12, 0, 0)
    assert q_map(r[2]) == (6, -1, -6 * e)
    assert exponent_lattice(*dual_basis(*r)) == [[1, 0, -1]]
    (eq,) = cross_ratio_equations(Weighting.trinodal(*r), [[0] * 3] * 3)
    assert eq.exponents == (-1, 0, 1)


def test_sign_flip_negates_third_coordinate():
    for n in NON_SQUARE[:10]:
        plus = [q_map(w) for w in prym.prym_data(n, "+").weights]
        minus = [q_map(w) for w in prym.prym_data(n, "-").weights]
        for a, b in zip(plus, minus):
            assert a[:2] == b[:2] and a[2] == -b[2]


@pytest.mark.parametrize("n", [n for n in NON_SQUARE if n <= 20])
def test_pipeline(n):
    for sign in "+-":
        rep = prym.prym_pipeline(n, sign)
        assert rep.ok, rep.failed()
        assert rep.equation.endswith("p12/p23 = e(-(b12-b23))")
        assert rep.to_json()["ok"] is True


def test_dual_basis_matches_closed_form():
    for n in NON_SQUARE[:12]:
        for e in (1, -1):
            data = prym.prym_data(n, e)
            s = dual_basis(*data.weights)
            assert list(s) == prym.expected_dual_basis(n, e)
            for i, r in enumerate(data.weights):
                assert [(r * x).trp() for x in s] == [Fraction(i == j) for j in range(3)]
            # s1 s2 = s2 s3 and s1 s3 is independent, so exponents are Z(1, 0, -1)
            assert s[0] * s[1] == s[1] * s[2]
            assert s[0] * s[2] != PCElem.make(data.D)
