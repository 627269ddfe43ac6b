"""Brute-force reference implementations used to cross-check the main algorithms."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction


def fm_feasible(rows, rhs):
    """Is {v : rows[i] . v >= rhs[i]} nonempty?  Fourier-Motzkin elimination."""
    system = [([Fraction(x) for x in r], Fraction(b)) for r, b in zip(rows, rhs)]
    n = len(rows[0])
    for var in range(n):
        pos = [(r, b) for r, b in system if r[var] > 0]
        neg = [(r, b) for r, b in system if r[var] < 0]
        rest = [(r, b) for r, b in system if r[var] == 0]
        for (rp, bp), (rn, bn) in itertools.product(pos, neg):
            cp, cn = rp[var], -rn[var]
            rest.append(([cn * x + cp * y for x, y in zip(rp, rn)], cn * bp + cp * bn))
        system = rest
    return all(b <= 0 for _, b in system)


def fm_admissible(images):
    """Admissible iff no v pairs >= 0 with every image and > 0 with one.

    Such a v exists iff {v : <v, Q_i> >= 0, sum_i <v, Q_i> >= 1} is feasible.
    """
    images = [list(q) for q in images]
    if all(x == 0 for q in images for x in q):
        return True
    rows = images + [[sum(q[i] for q in images) for i in range(3)]]
    rhs = [0] * len(images) + [1]
    return not fm_feasible(rows, rhs)


def sl2_brute(d):
    """|SL_2(Z/d)| by enumeration."""
    if d == 1:
        return 1
    return sum(1 for a, b, c, e in itertools.product(range(d), repeat=4) if (a * e - b * c) % d == 1 % d)


def ideals_of_norm_brute(D, d):
    """Primitive ideals <d, c + g> of O_D of norm d: roots of c^2 + cD + (D^2 - D)/4 mod d."""
    k = (D * D - D) // 4
    return [c for c in range(d) if (c * c + c * D + k) % d == 0]


def charpoly_faddeev(A):
    """Coefficients [1, c1, ..., cn] of det(xI - A) by Faddeev-LeVerrier."""
    n = len(A)
    A = [[Fraction(x) for x in row] for row in A]
    I = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    M = [[Fraction(0)] * n for _ in range(n)]
    coeffs = [Fraction(1)]
    c = Fraction(1)
    for k in range(1, n + 1):
        M = [[sum(A[i][t] * M[t][j] for t in range(n)) + c * I[i][j] for j in range(n)] for i in range(n)]
        AM = [[sum(A[i][t] * M[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        c = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def integer_points_in_kernel(cols, bound):
    """All integer a in [-bound, bound]^3 with sum a_i cols[i] = 0."""
    out = []
    for a in itertools.product(range(-bound, bound + 1), repeat=3):
        if all(sum(a[i] * cols[i][k] for i in range(3)) == 0 for k in range(len(cols[0]))):
            out.append(a)
    return out
