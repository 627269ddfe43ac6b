from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from quadcusp import modvariety as mv
from quadcusp.errors import NotInGamma
from quadcusp.exact import QuadElem, ZLinForm
from quadcusp.lattices import identity
from quadcusp.oracles import sl2_brute
from quadcusp.orders import primitive_ideals_of_norm

PAIRS = [(5, 11), (8, 7), (13, 3)]


@pytest.fixture(scope="module", params=PAIRS, ids=lambda p: f"D{p[0]}d{p[1]}")
def sd(request):
    D, d = request.param
    return mv.SmartData.from_ideal(primitive_ideals_of_norm(d, D)[0])


def Q(D, u=0, v=0):
    return QuadElem(D, u, v)


def ident(D):
    return mv.lift_quad(D, mv.Mat2.identity())


def test_module_membership_examples(sd):
    D = sd.D
    assert mv.in_sl2_module(ident(D), sd)
    assert mv.in_sl2_module(mv.Mat2(Q(D, 1), QuadElem.sqrt(D), Q(D), Q(D, 1)), sd)
    assert not mv.in_sl2_module(mv.Mat2(Q(D, 1), Q(D, Fraction(1, 2)), Q(D), Q(D, 1)), sd)


def test_cusp_matrix_sets(sd):
    D = sd.D
    S = mv.S_matrix(sd)
    assert S * S.inverse() == ident(D)
    assert mv.in_M_Dd(mv.Mat2(Q(D), Q(D), Q(D), Q(D)), sd)
    gen = mv.Mat2(Q(D, sd.d) / sd.eta2, Q(D), Q(D), Q(D))
    assert mv.in_M_Dd(gen, sd)


def test_group_membership_examples(sd):
    D = sd.D
    one = mv.GammaElem.identity(D)
    assert mv.in_gamma_lb(one, sd) and mv.in_gamma(one, sd) and mv.in_gamma_ub(one, sd)
    O = sd.O
    for t in (Q(D, 1), O.gamma, O.gamma * 3 - 2):
        g = mv.GammaElem(mv.Mat2(Q(D, 1), QuadElem.sqrt(D) * t, Q(D), Q(D, 1)), mv.Mat2.identity())
        assert mv.in_gamma_lb(g, sd) and mv.in_gamma(g, sd)
    w = mv.GammaElem(ident(D), mv.Mat2(1, 1, 0, 1))
    assert not mv.in_gamma_lb(w, sd)


def test_group_element_preconditions():
    with pytest.raises(NotInGamma):
        mv.GammaElem(mv.Mat2(Q(5, 2), Q(5), Q(5), Q(5, 1)), mv.Mat2.identity())


def test_phi_examples(sd):
    rng = random.Random(1)
    I = mv.Mat2(1, 0, 0, 1).mod(sd.d)
    assert mv.phi_reduction(ident(sd.D), sd) == I
    for _ in range(20):
        assert mv.phi_reduction(mv.random_lb_element(sd, rng).A, sd) == I
        A, B = mv.random_module_element(sd, rng), mv.random_module_element(sd, rng)
        assert mv.phi_reduction(A * B, sd) == mv.mat_mod_mul(
            mv.phi_reduction(A, sd), mv.phi_reduction(B, sd), sd.d)


def test_phi_is_onto(sd):
    """Every element of SL2(Z/d) is hit by the explicit section."""
    d = sd.d
    for a, b, c, e in itertools.product(range(d), repeat=4):
        if (a * e - b * c) % d != 1 % d:
            continue
        m = mv.Mat2(a, b, c, e)
        assert mv.phi_reduction(mv.phi_section(m, sd), sd) == m


@pytest.mark.parametrize("d", range(1, 13))
def test_sl2_order_matches_enumeration(d):
    assert mv.sl2_zd_order(d) == sl2_brute(d)


def test_sl2_named_values():
    assert mv.sl2_zd_order(1) == 1
    assert mv.sl2_zd_order(2) == 6
    assert mv.sl2_zd_order(6) == 144


def test_period_matrix_entries(sd):
    P = mv.period_matrix3(sd)
    D, d = sd.D, sd.d
    assert P[0][0] == ZLinForm(D, sd.eta1)
    assert P[2][5] == ZLinForm.var(3, D, Fraction(-1, d))
    assert P[0][2] == ZLinForm(D, 0)


def test_cocycle_identity_and_last_row(sd):
    D, d = sd.D, sd.d
    assert mv.M_of(mv.GammaElem.identity(D), sd) == identity(6)
    rng = random.Random(7)
    for _ in range(10):
        g = mv.random_lb_element(sd, rng)
        M = mv.M_of(g, sd)
        assert M[5][2] == -d * g.B.c
        assert mv.is_integral(M)


def test_cocycle_law(sd):
    rng = random.Random(11)
    for _ in range(15):
        g, h = mv.random_lb_element(sd, rng), mv.random_lb_element(sd, rng)
        left = _mm(mv.M_of(h, sd), mv.M_of(g, sd))
        right = mv.M_of(mv.GammaElem(g.A * h.A, g.B * h.B), sd)
        assert left == right
        assert mv.cocycle_holds(g, h, sd)


def _mm(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(6)) for j in range(6)] for i in range(6)]


def test_period_identity(sd):
    rng = random.Random(3)
    assert mv.verify_period_identity(mv.GammaElem.identity(sd.D), sd)
    for _ in range(10):
        g = mv.random_lb_element(sd, rng)
        M = mv.M_of(g, sd)
        assert mv.verify_period_identity(g, sd, M)
        bad = [row[:] for row in M]
        bad[1][4] += 1
        assert not mv.verify_period_identity(g, sd, bad)


def test_upper_bound_witness(sd):
    w = mv.ub_not_gamma_witness(sd)
    assert mv.in_gamma_ub(w, sd) and not mv.in_gamma(w, sd)
    assert not mv.is_integral(mv.M_of(w, sd))


def test_dimension_two_relation(sd):
    rng = random.Random(4)
    for _ in range(10):
        assert mv.verify_period_identity2(mv.random_module_element(sd, rng), sd)


def test_module_isomorphisms():
    from quadcusp.orders import QOrder, count_components

    a, b = primitive_ideals_of_norm(11, 5)
    D = 5
    assert mv.is_symplectic_module_iso(ident(D), a, a)
    # bounded search: entries with coordinates in {-1, 0, 1} for the (1, g) basis,
    # off-diagonal entries scaled by sqrt(D)^{+-1}; no isomorphism a -> b exists
    O = QOrder(D)
    rs = QuadElem.sqrt(D)
    small = [O.from_coords(p, q) for p in (-1, 0, 1) for q in (-1, 0, 1)]
    for x, y, z, w in itertools.product(small, repeat=4):
        M = mv.Mat2(x, y * rs, z / rs / 11, w)
        if M.det() == 1:
            assert not mv.is_symplectic_module_iso(M, a, b)
    assert count_components(5, 11) == 2
