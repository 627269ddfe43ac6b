"""Integer normal forms and symplectic structure of lattices.

Matrices are plain lists of rows.  Integer matrices hold ``int``; rational
ones hold :class:`fractions.Fraction`.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .errors import Degenerate, NotDirectSum, RankDeficient, WrongOrders

Matrix = list  # list of rows


# ---------------------------------------------------------------------------
# small dense helpers


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def transpose(M: Matrix) -> Matrix:
    return [list(col) for col in zip(*M)] if M else []


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = transpose(B)
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A: Matrix, v: Sequence) -> list:
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def vecmat(v: Sequence, A: Matrix) -> list:
    if not A:
        return []
    return [sum(v[i] * A[i][j] for i in range(len(A))) for j in range(len(A[0]))]


def det(M: Matrix):
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = A[i][j] * A[k][k] - A[i][k] * A[k][j]
                A[i][j] = num / prev if isinstance(num, Fraction) else _exact_div(num, prev)
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _exact_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        assert r == 0
        return q
    return Fraction(a) / b


def inverse(M: Matrix) -> Matrix:
    """Inverse of a square rational matrix by Gauss-Jordan."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            raise Degenerate("singular matrix")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def common_denominator(M: Matrix) -> int:
    den = 1
    for row in M:
        for x in row:
            den = math.lcm(den, Fraction(x).denominator)
    return den


def clear_denominators(M: Matrix) -> tuple[Matrix, int]:
    den = common_denominator(M)
    return [[int(Fraction(x) * den) for x in row] for row in M], den


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms


def hnf(M: Matrix) -> Matrix:
    """Row Hermite normal form: nonzero rows only, positive pivots, reduced above."""
    A = [[int(x) for x in row] for row in M]
    if not A:
        return []
    m, n = len(A), len(A[0])
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[piv] = A[piv], A[r]
            done = True
            for i in range(r + 1, m):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < m and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
            pivots.append(c)
            r += 1
    return A[:r]


def snf(M: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, S, V) with U*M*V = S diagonal, d1 | d2 | ..., U and V unimodular."""
    A = [[int(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row dst += k * row src
        A[dst] = [x + k * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + k * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    clean = clean and A[t][j] == 0
            if not clean:
                cand = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
                cand += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
                _, k, kind = min(cand)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    return U, A, V


def snf_invariants(M: Matrix) -> list[int]:
    _, S, _ = snf(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0)) if S[i][i]]


def rank(M: Matrix) -> int:
    if not M:
        return 0
    A, _ = clear_denominators(M)
    return len(hnf(A))


def integer_kernel(M: Matrix) -> Matrix:
    """Rows spanning {x in Z^n : M x = 0}, in HNF.  M may be rational."""
    if not M:
        raise ValueError("need at least one row")
    A, _ = clear_denominators(M)
    n = len(A[0])
    _, S, V = snf(A)
    r = sum(1 for i in range(min(len(S), n)) if S[i][i])
    cols = [[V[i][j] for i in range(n)] for j in range(r, n)]
    return hnf(cols) if cols else []


def rational_kernel(M: Matrix) -> Matrix:
    """Rows spanning {x in Q^n : M x = 0}, via reduced row echelon form."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A[0]) if A else 0
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fc]
        basis.append(v)
    return basis


def preimage_lattice(C: Matrix) -> Matrix:
    """Basis rows of {t in Q^n : C t in Z^m} for a rational m x n matrix C of rank n."""
    A, N = clear_denominators(C)
    n = len(A[0])
    _, S, V = snf(A)
    invs = [S[i][i] if i < len(S) else 0 for i in range(n)]
    if any(s == 0 for s in invs):
        raise RankDeficient("conditions do not determine a lattice")
    return [[Fraction(V[i][j] * N, invs[j]) for i in range(n)] for j in range(n)]


# ---------------------------------------------------------------------------
# rational lattices


class QLattice:
    """A lattice in Q^n, stored as integer HNF rows over a common denominator."""

    __slots__ = ("dim", "rows", "den")

    def __init__(self, gens: Sequence[Sequence], dim: int | None = None):
        gens = [list(g) for g in gens]
        if dim is None:
            if not gens:
                raise ValueError("dimension needed for the zero lattice")
            dim = len(gens[0])
        self.dim = dim
        if not gens:
            self.rows, self.den = [], 1
            return
        A, den = clear_denominators(gens)
        H = hnf(A)
        g = reduce(math.gcd, (x for row in H for x in row), den)
        self.rows = [[x // g for x in row] for row in H]
        self.den = den // g

    @property
    def basis(self) -> Matrix:
        return [[Fraction(x, self.den) for x in row] for row in self.rows]

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __eq__(self, other):
        if not isinstance(other, QLattice):
            return NotImplemented
        return (self.dim, self.rows, self.den) == (other.dim, other.rows, other.den)

    def __hash__(self):
        return hash((self.dim, tuple(map(tuple, self.rows)), self.den))

    def __add__(self, other: QLattice) -> QLattice:
        return QLattice(self.basis + other.basis, self.dim)

    def scale(self, c) -> QLattice:
        c = Fraction(c)
        return QLattice([[c * x for x in row] for row in self.basis], self.dim)

    def coordinates(self, v: Sequence) -> list[Fraction] | None:
        """Coefficients of v in the basis, or None if v is outside the Q-span."""
        B = self.basis
        if not B:
            return [] if all(x == 0 for x in v) else None
        # solve c * B = v
        aug = [list(col) + [Fraction(x)] for col, x in zip(transpose(B), v)]
        k = len(B)
        sol = _solve_consistent(aug, k)
        return sol

    def contains(self, v: Sequence) -> bool:
        c = self.coordinates(v)
        return c is not None and all(x.denominator == 1 for x in c)

    def contains_lattice(self, other: QLattice) -> bool:
        return all(self.contains(row) for row in other.basis)

    def index_in(self, other: QLattice) -> Fraction:
        """[other : self] for full-rank lattices of equal rank."""
        return abs(Fraction(det(self.basis)) / det(other.basis))

    def __repr__(self):
        return f"QLattice(rows={self.rows}, den={self.den})"


def _solve_consistent(aug: Matrix, k: int) -> list[Fraction] | None:
    A = [[Fraction(x) for x in row] for row in aug]
    pivots = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    if any(A[i][k] != 0 for i in range(r, len(A))):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        sol[c] = A[i][k]
    return sol


def intersect_subspace(L: QLattice, V: Sequence[Sequence]) -> QLattice:
    """The saturated lattice L intersected with span_Q(V)."""
    V = [list(v) for v in V if any(x != 0 for x in v)]
    if not V or not L.rows:
        return QLattice([], L.dim)
    ann = rational_kernel(V)
    B = L.basis
    if not ann:
        return L
    # x in Z^k with (x B) . a = 0 for every a in ann
    BA = matmul(B, transpose(ann))  # k x len(ann)
    K = integer_kernel(transpose(BA))
    return QLattice([vecmat(x, B) for x in K], L.dim)


# ---------------------------------------------------------------------------
# alternating forms


def is_alternating(G: Matrix) -> bool:
    n = len(G)
    return all(G[i][j] == -G[j][i] for i in range(n) for j in range(n))


def symplectic_type(G: Matrix) -> tuple[int, ...]:
    n = len(G)
    if n % 2 or not is_alternating(G):
        raise Degenerate("not an alternating form of even size")
    invs = snf_invariants(G)
    if len(invs) != n:
        raise Degenerate("alternating form is degenerate")
    pairs = invs[0::2]
    if pairs != invs[1::2]:
        raise Degenerate(f"invariants {invs} do not pair up")
    return tuple(pairs)


def standard_form(delta: Sequence[int]) -> Matrix:
    g = len(delta)
    J = zeros(2 * g, 2 * g)
    for i, d in enumerate(delta):
        J[i][g + i] = d
        J[g + i][i] = -d
    return J


def symplectic_basis(G: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Unimodular U with U G U^T = [[0, Delta], [-Delta, 0]] and the type Delta.

    Rows of U are (e_1, ..., e_g, f_1, ..., f_g).
    """
    n = len(G)
    if n % 2 or not is_alternating(G):
        raise Degenerate("not an alternating form of even size")
    Gi = [[int(x) for x in row] for row in G]

    def pair(x, y):
        return sum(x[i] * Gi[i][j] * y[j] for i in range(n) for j in range(n) if x[i] and y[j])

    def add(x, y, k=1):
        return [a + k * b for a, b in zip(x, y)]

    rest = [list(r) for r in identity(n)]
    es, fs, ds = [], [], []
    while rest:
        best = None
        for i in range(len(rest)):
            for j in range(i + 1, len(rest)):
                p = pair(rest[i], rest[j])
                if p and (best is None or abs(p) < best[0]):
                    best = (abs(p), i, j, p)
        if best is None:
            raise Degenerate("alternating form is degenerate")
        m, i, j, p = best
        e, f = rest[i], rest[j] if p > 0 else [-x for x in rest[j]]
        others = [rest[k] for k in range(len(rest)) if k not in (i, j)]
        restart = False
        for k, v in enumerate(others):
            pe, pf = pair(e, v), pair(f, v)
            if pe % m:
                others[k] = add(v, f, -(pe // m))
                restart = True
                break
            if pf % m:
                others[k] = add(v, e, pf // m)
                restart = True
                break
            others[k] = add(add(v, e, pf // m), f, -(pe // m))
        if restart:
            rest = [e, f] + others
            continue
        bad = next(
            (v for a, v in enumerate(others) for w in others[a + 1:] if pair(v, w) % m),
            None,
        )
        if bad is not None:
            rest = [add(e, bad), f] + others
            continue
        es.append(e)
        fs.append(f)
        ds.append(m)
        rest = others
    return es + fs, tuple(ds)


def degree(G: Matrix) -> int:
    """Product of the type entries: the square root of |det G|."""
    dt = abs(det(G))
    r = math.isqrt(dt)
    if r * r != dt:
        raise Degenerate("determinant of an alternating form must be a square")
    return r


def sublattice_degree_check(sub: Matrix, G: Matrix) -> tuple[int, int, int]:
    """(index, deg of the form on the big lattice, deg on the sublattice).

    ``sub`` lists the sublattice basis in coordinates of the big lattice.
    """
    index = abs(det(sub))
    if index == 0:
        raise RankDeficient("sublattice is not of full rank")
    Gsub = matmul(matmul(sub, G), transpose(sub))
    return index, degree(G), degree(Gsub)


# ---------------------------------------------------------------------------
# representatives differing from a basis by rational multiples


def class_order(v: Sequence[int], B: Matrix) -> int:
    """Order of v + L in Z^n / L, L spanned by the rows of B."""
    coords = vecmat(v, inverse(B))
    return reduce(math.lcm, (Fraction(c).denominator for c in coords), 1)


def rational_basis_reps(B: Matrix, classes: Sequence[Sequence[int]], orders: Sequence[int]):
    """Basis mu of L = rowspan(B) and representatives w_i of the given classes
    with orders[i] * w_i = a_i * mu_i, 1 <= a_i <= orders[i], gcd(a_i, orders[i]) = 1.

    Returns (mu, reps, a).
    """
    n = len(B)
    d = list(orders)
    if len(classes) != n or len(d) != n:
        raise ValueError("need one class and one order per basis vector")
    if any(x <= 0 for x in d) or any(d[i + 1] % d[i] for i in range(n - 1)):
        raise WrongOrders("orders must be positive and form a divisor chain")
    index = abs(det(B))
    if index == 0:
        raise RankDeficient("L is not of full rank")
    if math.prod(d) != index:
        raise NotDirectSum(f"product of orders {math.prod(d)} differs from index {index}")
    for v, di in zip(classes, d):
        if class_order(v, B) != di:
            raise WrongOrders(f"class of {list(v)} does not have order {di}")
    if abs(det(hnf([list(r) for r in B] + [list(v) for v in classes])[:n])) != 1:
        raise NotDirectSum("classes do not generate the quotient")

    Binv = inverse(B)
    # C[i] = coordinates of d_i * w_i in the basis B
    C = [[int(x) for x in vecmat([di * x for x in v], Binv)] for v, di in zip(classes, d)]
    mu = [list(r) for r in B]
    reps = [list(v) for v in classes]

    def col_add(dst, src, k):  # column dst += k column src; basis mu_src -= k mu_dst
        for row in C:
            row[dst] += k * row[src]
        mu[src] = [x - k * y for x, y in zip(mu[src], mu[dst])]

    def col_swap(i, j):
        for row in C:
            row[i], row[j] = row[j], row[i]
        mu[i], mu[j] = mu[j], mu[i]

    # make C upper triangular using column operations on columns 0..i
    for i in range(n - 1, -1, -1):
        while True:
            nz = [j for j in range(i + 1) if C[i][j]]
            if len(nz) <= 1 and (not nz or nz[0] == i):
                break
            piv = min(nz, key=lambda j: abs(C[i][j]))
            col_swap(piv, i)
            for j in range(i):
                if C[i][j]:
                    col_add(j, i, -(C[i][j] // C[i][i]))

    a = [0] * n
    for i in range(n - 1, -1, -1):
        aii = C[i][i]
        if math.gcd(aii, d[i]) != 1:
            raise NotDirectSum("diagonal coefficient not coprime to the order")
        inv = pow(aii, -1, d[i]) if d[i] > 1 else 0
        for j in range(i + 1, n):
            cj = (C[i][j] * inv) % d[i] if d[i] > 1 else 0
            # mu_i' = mu_i + cj mu_j: coefficients in other rows shift
            if cj:
                for row in C:
                    row[j] -= cj * row[i]
                mu[i] = [x + cj * y for x, y in zip(mu[i], mu[j])]
            rem = C[i][j]
            assert rem % d[i] == 0
            if rem:
                reps[i] = [x - (rem // d[i]) * y for x, y in zip(reps[i], mu[j])]
                C[i][j] = 0
        k = (aii - 1) // d[i]
        if k:
            reps[i] = [x - k * y for x, y in zip(reps[i], mu[i])]
        a[i] = aii - k * d[i]

    for i in range(n):
        if [d[i] * x for x in reps[i]] != [a[i] * x for x in mu[i]]:
            raise AssertionError("rational basis construction failed")
    if abs(det(mu)) != index:
        raise AssertionError("constructed vectors are not a basis")
    return mu, reps, a
