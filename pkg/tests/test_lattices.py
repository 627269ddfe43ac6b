from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from quadcusp import lattices as lat
from quadcusp.orders import pairing_lattice, primitive_ideals_of_norm, _integral_gram
from quadcusp.suites import random_alternating, random_unimodular, rational_reps_instance

small_mats = st.integers(2, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n))


def minors_gcd(M, k):
    """gcd of all k x k minors (determinantal divisor)."""
    n, m = len(M), len(M[0])
    g = 0
    for rows in itertools.combinations(range(n), k):
        for cols in itertools.combinations(range(m), k):
            g = math.gcd(g, int(lat.det([[M[i][j] for j in cols] for i in rows])))
    return g


def test_snf_identity_and_textbook_case():
    U, S, V = lat.snf(lat.identity(3))
    assert S == lat.identity(3)
    assert lat.snf_invariants([[4, 0], [0, 6]]) == [2, 12]


@given(small_mats)
@settings(max_examples=80, deadline=None)
def test_snf_against_determinantal_divisors(M):
    U, S, V = lat.snf(M)
    assert lat.matmul(lat.matmul(U, M), V) == S
    assert abs(lat.det(U)) == 1 and abs(lat.det(V)) == 1
    n = len(M)
    diag = [S[i][i] for i in range(n)]
    assert all(S[i][j] == 0 for i in range(n) for j in range(n) if i != j)
    prev = 1
    for k in range(1, n + 1):
        dk = minors_gcd(M, k)
        if dk == 0:
            assert all(x == 0 for x in diag[k - 1:])
            break
        assert abs(diag[k - 1]) * prev == dk
        prev = dk
    nz = [abs(x) for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(small_mats, st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_hnf_is_row_order_invariant(M, rnd):
    P = M[:]
    rnd.shuffle(P)
    assert lat.hnf(P) == lat.hnf(M)


def test_standard_types():
    for g in (1, 2, 3):
        assert lat.symplectic_type(lat.standard_form((1,) * g)) == (1,) * g
    G = lat.standard_form((1, 2))
    assert lat.symplectic_type([[5 * x for x in r] for r in G]) == (5, 10)
    for I in primitive_ideals_of_norm(11, 5):
        assert lat.symplectic_type(_integral_gram(pairing_lattice(I, "O+a"))) == (1, 11)


def test_symplectic_basis_on_standard_form():
    J = lat.standard_form((1, 1))
    V, delta = lat.symplectic_basis(J)
    assert delta == (1, 1)
    assert lat.matmul(lat.matmul(V, J), lat.transpose(V)) == J
    assert all(sorted(abs(x) for x in row) == [0, 0, 0, 1] for row in V)


def test_symplectic_basis_recovers_conjugated_types():
    rng = random.Random(5)
    for delta in [(1, 1), (1, 2), (1, 1, 1), (2, 6), (1, 3, 6)]:
        U = random_unimodular(rng, 2 * len(delta))
        G = lat.matmul(lat.matmul(U, lat.standard_form(delta)), lat.transpose(U))
        V, got = lat.symplectic_basis(G)
        assert got == delta
        assert lat.matmul(lat.matmul(V, G), lat.transpose(V)) == lat.standard_form(delta)


@given(st.integers(0, 10**9), st.sampled_from([2, 4, 6]))
@settings(max_examples=40, deadline=None)
def test_symplectic_basis_random(seed, n):
    G = random_alternating(random.Random(seed), n, 12)
    V, delta = lat.symplectic_basis(G)
    assert abs(lat.det(V)) == 1
    assert lat.matmul(lat.matmul(V, G), lat.transpose(V)) == lat.standard_form(delta)
    assert math.prod(delta) ** 2 == abs(lat.det(G))


def test_degree_law_examples():
    G = lat.standard_form((1, 3))
    assert lat.sublattice_degree_check(lat.identity(4), G) == (1, 3, 3)
    two = [[2 * x for x in r] for r in lat.identity(4)]
    index, dG, dS = lat.sublattice_degree_check(two, G)
    assert index == 16 and dS == 16 * dG
    S = [[1, 0, 0, 0], [0, 2, 0, 0], [0, 1, 3, 0], [4, 0, 0, 1]]
    index, dG, dS = lat.sublattice_degree_check(S, G)
    assert index == abs(lat.det(S)) == 6 and dS == 6 * dG


def test_intersect_subspace():
    L = lat.QLattice([[1, 2, 0], [0, 3, 1], [1, 1, 1]])
    assert lat.intersect_subspace(L, lat.identity(3)) == L
    assert lat.intersect_subspace(L, []).rank == 0
    rng = random.Random(2)
    B = random_unimodular(rng, 6)
    L6 = lat.QLattice([[Fraction(x, 2) for x in r] for r in B])
    V = [[1, 0, 1, 0, 0, 0], [0, 1, 0, 0, 2, 0], [0, 0, 0, 1, 0, -1]]
    M = lat.intersect_subspace(L6, V)
    assert M.rank == 3
    assert all(lat.rank(V + [list(b)]) == 3 for b in M.basis)
    assert all(L6.contains(b) for b in M.basis)


def test_rational_basis_reps_trivial_cases():
    mu, reps, a = lat.rational_basis_reps(lat.identity(3), lat.identity(3), [1, 1, 1])
    assert a == [1, 1, 1]
    B = [[4, 0], [0, 4]]
    mu, reps, a = lat.rational_basis_reps(B, lat.identity(2), [4, 4])
    assert a == [1, 1]
    assert lat.QLattice(mu) == lat.QLattice(B)
    for i in range(2):
        assert [4 * x for x in reps[i]] == mu[i]


def test_rational_basis_reps_by_substitution():
    rng = random.Random(12)
    done = 0
    while done < 30:
        B, classes, d = rational_reps_instance(rng, 3)
        if math.prod(d) != 12:
            continue
        done += 1
        mu, reps, a = lat.rational_basis_reps(B, classes, d)
        L = lat.QLattice(B)
        assert lat.QLattice(mu) == L
        for i in range(3):
            assert [d[i] * x for x in reps[i]] == [a[i] * x for x in mu[i]]
            assert math.gcd(a[i], d[i]) == 1
            assert L.contains([x - y for x, y in zip(reps[i], classes[i])])


def test_integer_kernel_against_enumeration():
    from quadcusp.oracles import integer_points_in_kernel

    rng = random.Random(3)
    for _ in range(30):
        M = [[rng.randint(-3, 3) for _ in range(3)] for _ in range(rng.choice((1, 2)))]
        K = lat.integer_kernel(M)
        assert all(all(x == 0 for x in lat.matvec(M, v)) for v in K)
        assert len(K) == 3 - lat.rank(M)
        L = lat.QLattice(K, 3)
        for p in integer_points_in_kernel(lat.transpose(M), 3):
            assert L.contains(p)
