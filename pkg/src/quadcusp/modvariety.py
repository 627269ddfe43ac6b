"""Modular groups for abelian threefolds with real multiplication, their
period matrices and the cocycle of the universal family.

Everything is parameterized by a smart basis (eta1, eta2) of a primitive
ideal a of norm d, see :func:`quadcusp.orders.smart_basis`.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Sequence

from . import lattices as lat
from .errors import DecompositionFails, NormMismatch, NotInGamma, NotSmartBasis
from .exact import QuadElem, ZLinForm
from .orders import (
    FracIdeal,
    QIdeal,
    QOrder,
    count_components,
    factorize,
    ideal_inverse,
    ideal_mul,
    ideal_of_smart_basis,
    is_smart_basis,
)

class Mat2:
    """A 2x2 matrix [[a, b], [c, d]] over any ring-like entries."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls, one=1):
        return cls(one, 0 * one, 0 * one, one)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, o):
        if isinstance(o, Mat2):
            return Mat2(
                self.a * o.a + self.b * o.c,
                self.a * o.b + self.b * o.d,
                self.c * o.a + self.d * o.c,
                self.c * o.b + self.d * o.d,
            )
        return Mat2(self.a * o, self.b * o, self.c * o, self.d * o)

    def __add__(self, o):
        return Mat2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o):
        return Mat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def inverse(self):
        dt = self.det()
        if dt == 1:
            return Mat2(self.d, -self.b, -self.c, self.a)
        inv = 1 / dt
        return Mat2(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def adjugate(self) -> Mat2:
        """[[d, -b], [-c, a]]; the inverse when det = 1, also modulo d."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def conj(self):
        return Mat2(*(x.conj() if isinstance(x, QuadElem) else x for x in self.entries()))

    def __eq__(self, o):
        if not isinstance(o, Mat2):
            return NotImplemented
        return self.entries() == o.entries()

    def __hash__(self):
        return hash(self.entries())

    def mod(self, d: int) -> Mat2:
        return Mat2(*(int(x) % d for x in self.entries()))

    def __repr__(self):
        return f"Mat2({self.a}, {self.b}, {self.c}, {self.d})"

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def lift_quad(D: int, m: Mat2) -> Mat2:
    return Mat2(*(x if isinstance(x, QuadElem) else QuadElem(D, x) for x in m.entries()))


class GammaElem:
    """A pair (A, B) with A over Q(sqrt D) and B over Z, both of determinant one."""

    __slots__ = ("A", "B")

    def __init__(self, A: Mat2, B: Mat2):
        if A.det() != 1:
            raise NotInGamma(f"det A = {A.det()} != 1")
        if any(not isinstance(x, int) for x in B.entries()) or B.det() != 1:
            raise NotInGamma("B must be an integer matrix of determinant one")
        self.A, self.B = A, B

    @property
    def D(self) -> int:
        return self.A.a.D

    @classmethod
    def identity(cls, D: int) -> GammaElem:
        return cls(lift_quad(D, Mat2.identity()), Mat2.identity())

    def __mul__(self, o: GammaElem) -> GammaElem:
        return GammaElem(self.A * o.A, self.B * o.B)

    def inverse(self) -> GammaElem:
        return GammaElem(self.A.inverse(), self.B.inverse())

    def __eq__(self, o):
        return isinstance(o, GammaElem) and self.A == o.A and self.B == o.B

    def __hash__(self):
        return hash((self.A, self.B))

    def __repr__(self):
        return f"GammaElem({self.A}, {self.B})"


# ---------------------------------------------------------------------------
# fractional ideals attached to a smart basis


class SmartData:
    """Fractional ideals and constants determined by a smart basis."""

    def __init__(self, eta1: QuadElem, eta2: QuadElem, d: int):
        self.D = D = eta1.D
        self.d = d
        self.eta1, self.eta2 = eta1, eta2
        self.ideal = ideal_of_smart_basis(eta1, eta2, d)
        if not is_smart_basis(self.ideal, eta1, eta2):
            raise NotSmartBasis("(eta2^s, d eta1^s) is not a smart basis")
        O = QOrder(D)
        self.O = O
        self.sqrtD = QuadElem.sqrt(D)
        one = QuadElem(D, 1)
        a = FracIdeal.from_ideal(self.ideal)
        self.a_frac = a
        self.order_frac = FracIdeal(D, [one, O.gamma])
        rs = self.sqrtD.inverse()
        # SL2(O + (1/sqrt D) a)
        self.upper = a.conj().scale(self.sqrtD / d)
        self.lower = a.scale(rs)
        # M_{D,d}
        self.M_ideals = (
            self.order_frac.scale(QuadElem(D, d) / eta2),
            self.order_frac.scale(self.sqrtD / eta1.conj()),
            a.scale(QuadElem(D, d) / (self.sqrtD * eta2)),
            a.scale(eta1.conj().inverse()),
        )
        self.s = self.sqrtD / d * eta2 / eta1.conj()
        # lower bound group
        self.a2_frac = FracIdeal.from_ideal(ideal_mul(self.ideal, self.ideal))
        self.lb_upper = self.order_frac.scale(self.sqrtD)
        self.lb_lower = self.a2_frac.scale(rs)

    @classmethod
    def from_ideal(cls, I: QIdeal) -> SmartData:
        from .orders import smart_basis

        e1, e2 = smart_basis(I)
        return cls(e1, e2, I.norm())


def _as_smart(sd_or_eta, eta2=None, d=None) -> SmartData:
    if isinstance(sd_or_eta, SmartData):
        return sd_or_eta
    return SmartData(sd_or_eta, eta2, d)


def in_sl2_module(A: Mat2, sd: SmartData) -> bool:
    """A in SL2(O + (1/sqrt D) a)."""
    if A.det() != 1:
        return False
    return (
        sd.order_frac.contains(A.a)
        and sd.upper.contains(A.b)
        and sd.lower.contains(A.c)
        and sd.order_frac.contains(A.d)
    )


def S_matrix(sd: SmartData) -> Mat2:
    D = sd.D
    return Mat2(QuadElem(D), sd.s, QuadElem(D, 1), QuadElem(D))


def in_M_Dd(X: Mat2, sd: SmartData) -> bool:
    return all(J.contains(x) for J, x in zip(sd.M_ideals, X.entries()))


def conjugated_B(B: Mat2, sd: SmartData) -> Mat2:
    """S B S^-1 = [[b4, s b3], [b2 / s, b1]]."""
    D = sd.D
    return Mat2(QuadElem(D, B.d), sd.s * B.c, sd.s.inverse() * B.b, QuadElem(D, B.a))


def in_gamma(g: GammaElem, sd: SmartData) -> bool:
    if not in_sl2_module(g.A, sd):
        return False
    return in_M_Dd(g.A - conjugated_B(g.B, sd), sd)


def in_gamma_lb_tilde(A: Mat2, sd: SmartData) -> bool:
    if A.det() != 1:
        return False
    a = sd.a_frac
    return (
        a.contains(A.a - 1)
        and sd.lb_upper.contains(A.b)
        and sd.lb_lower.contains(A.c)
        and a.contains(A.d - 1)
    )


def in_gamma_lb(g: GammaElem, sd: SmartData) -> bool:
    d = sd.d
    B = g.B
    return in_gamma_lb_tilde(g.A, sd) and (B.a - 1) % d == 0 and B.b % d == 0 and B.c % d == 0 and (B.d - 1) % d == 0


def in_gamma_ub(g: GammaElem, sd: SmartData) -> bool:
    return in_sl2_module(g.A, sd)


# ---------------------------------------------------------------------------
# reduction mod d


def _decompose(x: QuadElem, basis: Sequence[QuadElem], O: QOrder) -> tuple[int, int]:
    cols = [O.to_coords(b) for b in basis]
    target = O.to_coords(x)
    M = [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]]
    sol = lat.matvec(lat.inverse(M), target)
    if any(Fraction(c).denominator != 1 for c in sol):
        raise DecompositionFails(f"{x} is not in the span of {[str(b) for b in basis]}")
    return int(sol[0]), int(sol[1])


def phi_reduction(A: Mat2, sd: SmartData) -> Mat2:
    """The reduction SL2(O + (1/sqrt D) a) -> SL2(Z/dZ) with kernel the lower bound group."""
    D, d, O = sd.D, sd.d, sd.O
    omega = O.from_coords(sd.ideal.a, 1)
    one = QuadElem(D, 1)
    s = sd.sqrtD
    x1, _ = _decompose(A.a, [one, omega], O)
    _, y2 = _decompose(A.b / s, [one, omega.conj() / d], O)
    x3, y3 = _decompose(A.c * s, [QuadElem(D, d), omega], O)
    x4, _ = _decompose(A.d, [one, omega], O)
    nd = int(omega.norm()) // d
    low = x3 * int(omega.trace()) + y3 * nd
    return Mat2(x1 % d, y2 % d, low % d, x4 % d)


def mat_mod_mul(X: Mat2, Y: Mat2, d: int) -> Mat2:
    return (X * Y).mod(d)


def sl2_zd_order(d: int) -> int:
    if d < 1:
        raise ValueError("d must be positive")
    num, den = d**3, 1
    for p in factorize(d) if d > 1 else {}:
        num *= p * p - 1
        den *= p * p
    return num // den


def sl2_lift(m: Mat2, d: int) -> Mat2:
    """An integer matrix of determinant one reducing to m mod d."""
    a, b, c, e = (int(x) % d for x in m.entries())
    if d == 1:
        return Mat2.identity()
    if (a * e - b * c) % d != 1:
        raise ValueError("matrix is not in SL2(Z/dZ)")
    if c == 0:
        c = d
    k = 0
    while math.gcd(a + k * d, c) != 1:
        k += 1
    a = a + k * d
    # a*e' - b'*c = 1 with e' = e + s d, b' = b + t d
    # a*s*d - c*t*d = 1 - (a*e - b*c)
    r = (1 - (a * e - b * c))
    assert r % d == 0
    r //= d
    g, u, v = _egcd(a, -c)  # a u - c v = g = 1
    s_, t_ = u * r, v * r
    return Mat2(a, b + t_ * d, c, e + s_ * d)


def _egcd(a: int, b: int):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return (g, y, x - (a // b) * y)


def elementary_word(M: Mat2) -> list[tuple[str, int]]:
    """Write M in SL2(Z) as a product of ('U', k) = [[1,k],[0,1]] and ('L', k) = [[1,0],[k,1]]."""
    cur = Mat2(*M.entries())
    applied = []  # elementaries multiplied on the left, in order

    def left(op):
        nonlocal cur
        cur = _elem(op) * cur
        applied.append(op)

    while cur.c != 0:
        if cur.a == 0:
            left(("U", 1))
            left(("L", -1))
        elif abs(cur.a) >= abs(cur.c):
            left(("U", -(cur.a // cur.c)))
        else:
            left(("L", -(cur.c // cur.a)))
    if cur.a == -1:
        for op in [("U", -1), ("L", 1), ("U", -1)] * 2:  # the square of S is -I
            left(op)
    if cur.b:
        left(("U", -cur.b))
    assert cur == Mat2.identity(), cur
    # E_n ... E_1 M = I, so M = E_1^-1 ... E_n^-1
    return [(kind, -k) for kind, k in applied]


def _elem(op) -> Mat2:
    kind, k = op
    return Mat2(1, k, 0, 1) if kind == "U" else Mat2(1, 0, k, 1)


def phi_section(m: Mat2, sd: SmartData) -> Mat2:
    """An element of SL2(O + (1/sqrt D) a) whose reduction is m, built from elementaries."""
    D, d, O = sd.D, sd.d, sd.O
    omega = O.from_coords(sd.ideal.a, 1)
    tr = int(omega.trace())
    nd = int(omega.norm()) // d
    g, u, v = _egcd(tr, nd)
    ginv = pow(g, -1, d) if d > 1 else 0
    out = lift_quad(D, Mat2.identity())
    for kind, k in elementary_word(sl2_lift(m, d)):
        if kind == "U":
            x = sd.sqrtD * k * omega.conj() / d
            out = out * Mat2(QuadElem(D, 1), x, QuadElem(D), QuadElem(D, 1))
        else:
            t = (k * ginv) % d if d > 1 else 0
            x3, y3 = u * t, v * t
            y = (QuadElem(D, x3 * d) + y3 * omega) / sd.sqrtD
            out = out * Mat2(QuadElem(D, 1), QuadElem(D), y, QuadElem(D, 1))
    return out


# ---------------------------------------------------------------------------
# random sampling


def random_lb_element(sd: SmartData, rng: random.Random, length: int = 8, height: int = 2) -> GammaElem:
    """A word in elementary generators of the lower bound group."""
    D, d = sd.D, sd.d
    one, zero = QuadElem(D, 1), QuadElem(D)
    A = lift_quad(D, Mat2.identity())
    B = Mat2.identity()
    a2 = sd.a2_frac.basis()
    for _ in range(rng.randint(1, length)):
        kind = rng.randrange(4)
        if kind == 0:
            t = sd.O.from_coords(rng.randint(-height, height), rng.randint(-height, height))
            A = A * Mat2(one, sd.sqrtD * t, zero, one)
        elif kind == 1:
            x = (rng.randint(-height, height) * a2[0] + rng.randint(-height, height) * a2[1]) / sd.sqrtD
            A = A * Mat2(one, zero, x, one)
        elif kind == 2:
            B = B * Mat2(1, d * rng.randint(-height, height), 0, 1)
        else:
            B = B * Mat2(1, 0, d * rng.randint(-height, height), 1)
    return GammaElem(A, B)


def random_module_element(sd: SmartData, rng: random.Random, length: int = 6, height: int = 2) -> Mat2:
    """A word in elementary generators of SL2(O + (1/sqrt D) a)."""
    D = sd.D
    one, zero = QuadElem(D, 1), QuadElem(D)
    up = sd.upper.basis()
    lo = sd.lower.basis()
    A = lift_quad(D, Mat2.identity())
    for _ in range(rng.randint(1, length)):
        if rng.random() < 0.5:
            x = rng.randint(-height, height) * up[0] + rng.randint(-height, height) * up[1]
            A = A * Mat2(one, x, zero, one)
        else:
            y = rng.randint(-height, height) * lo[0] + rng.randint(-height, height) * lo[1]
            A = A * Mat2(one, zero, y, one)
    return A


def ub_not_gamma_witness(sd: SmartData) -> GammaElem:
    """(I, [[1,1],[0,1]]) lies in the upper bound group but not in Gamma when d > 1."""
    return GammaElem(lift_quad(sd.D, Mat2.identity()), Mat2(1, 1, 0, 1))


# ---------------------------------------------------------------------------
# period matrices


def period_matrix3(sd: SmartData) -> list[list[ZLinForm]]:
    D, d = sd.D, sd.d
    e1, e2 = sd.eta1, sd.eta2
    rs = sd.sqrtD.inverse()
    L = ZLinForm

    def c(x):
        return L(D, x)

    def z(i, x):
        return L.var(i, D, x)

    return [
        [c(e1), c(e2), c(0), z(1, rs * e2.conj()), z(1, -rs * e1.conj()), c(e2 / d)],
        [c(e1.conj()), c(e2.conj()), c(0), z(2, -rs * e2), z(2, rs * e1), c(e2.conj() / d)],
        [c(0), c(0), c(1), c(0), c(Fraction(1, d)), z(3, Fraction(-1, d))],
    ]


def period_matrix2(sd: SmartData) -> list[list[ZLinForm]]:
    """Columns are phi_z of ((eta1,0), (eta2,0), (0, eta2^s/sqrt D), (0, -d eta1^s/sqrt D))."""
    D, d = sd.D, sd.d
    rs = sd.sqrtD.inverse()
    cols = module_basis2(sd)
    rows = [[], []]
    for x, y in cols:
        rows[0].append(ZLinForm(D, x) + ZLinForm.var(1, D, y))
        rows[1].append(ZLinForm(D, x.conj()) + ZLinForm.var(2, D, y.conj()))
    return rows


def module_basis2(sd: SmartData):
    D, d = sd.D, sd.d
    rs = sd.sqrtD.inverse()
    zero = QuadElem(D)
    return [
        (sd.eta1, zero),
        (sd.eta2, zero),
        (zero, sd.eta2.conj() * rs),
        (zero, -d * sd.eta1.conj() * rs),
    ]


# ---------------------------------------------------------------------------
# the cocycle M(A, B)


def _tr(x) -> Fraction:
    if isinstance(x, QuadElem):
        return x.trace()
    return 2 * Fraction(x)


def M_of(g: GammaElem, sd: SmartData) -> list[list[Fraction]]:
    """The explicit 6x6 matrix with Pi_z M(A,B) = D(A,B,z)^-1 Pi_{(A,B).z}."""
    D, d = sd.D, sd.d
    a1, a2, a3, a4 = g.A.entries()
    b1, b2, b3, b4 = g.B.entries()
    e1, e2 = sd.eta1, sd.eta2
    e1s, e2s = e1.conj(), e2.conj()
    s = sd.sqrtD
    N1, N2 = e1.norm(), e2.norm()
    F = Fraction
    return [
        [
            _tr(e1 * e2s * a4 / -s),
            _tr(N2 * a4 / -s),
            F(0),
            _tr(e2s * e2s * a2 / -D),
            _tr(e1s * e2s * a2 / D),
            _tr(N2 * a4 / (-d * s)),
        ],
        [
            _tr(N1 * a4 / s),
            _tr(e1s * e2 * a4 / s),
            F(b3),
            _tr(e1s * e2s * a2 / D),
            F(b3, d) - _tr(e1s * e1s * a2 / D),
            F(-b1, d) + _tr(e1s * e2 * a4 / (d * s)),
        ],
        [
            _tr(e1 * e2 * a3 / d),
            _tr(e2 * e2 * a3 / d),
            F(b4),
            _tr(N2 * a1 / (d * s)),
            F(b4, d) - _tr(e1s * e2 * a1 / (d * s)),
            F(-b2, d) + _tr(e2 * e2 * a3 / (d * d)),
        ],
        [
            _tr(-e1 * e1 * a3),
            _tr(-e1 * e2 * a3),
            F(0),
            _tr(e1 * e2s * a1 / -s),
            _tr(N1 * a1 / s),
            _tr(e1 * e2 * a3 / -d),
        ],
        [
            _tr(-e1 * e2 * a3),
            _tr(-e2 * e2 * a3),
            F(0),
            _tr(N2 * a1 / -s),
            _tr(e1s * e2 * a1 / s),
            _tr(e2 * e2 * a3 / -d),
        ],
        [F(0), F(0), F(-d * b3), F(0), F(-b3), F(b1)],
    ]


def is_integral(M) -> bool:
    return all(Fraction(x).denominator == 1 for row in M for x in row)


def cocycle_holds(g: GammaElem, h: GammaElem, sd: SmartData) -> bool:
    """M(h) M(g) = M(g h) for g = (A, B), h = (A~, B~)."""
    return lat.matmul(M_of(h, sd), M_of(g, sd)) == M_of(g * h, sd)


def _mobius_row(i: int, g: GammaElem):
    if i == 0:
        return g.A.entries()
    if i == 1:
        return g.A.conj().entries()
    return g.B.entries()


def period_identity_sides(g: GammaElem, sd: SmartData, M=None):
    """Both sides of Pi_z M = D^-1 Pi_{g.z}, each entry a linear form.

    The right side is cleared row by row: row i is multiplied by the
    denominator c z_i + d, which turns Pi_{g.z} into a linear form.
    """
    if M is None:
        M = M_of(g, sd)
    P = period_matrix3(sd)
    D = sd.D
    lhs = [
        [sum((P[i][k] * M[k][j] for k in range(6)), ZLinForm(D)) for j in range(6)]
        for i in range(3)
    ]
    rhs = []
    for i in range(3):
        a, b, c, dd = _mobius_row(i, g)
        rhs.append([P[i][j].mobius_clear(i + 1, a, b, c, dd) for j in range(6)])
    return lhs, rhs


def verify_period_identity(g: GammaElem, sd: SmartData, M=None, require_member: bool = True) -> bool:
    if require_member and not in_gamma(g, sd):
        raise NotInGamma(f"{g} is not in Gamma_(D,d)(eta1, eta2)")
    lhs, rhs = period_identity_sides(g, sd, M)
    return lhs == rhs


def verify_period_identity2(A: Mat2, sd: SmartData) -> bool:
    """The dimension-two relation phi_{Az}((x,y) M*^t) = phi_z(x,y) / (c z + d).

    Checked for every basis vector of O + (1/sqrt D) a after clearing the
    denominator c z + d, in both embeddings; also checks M* preserves the lattice.
    """
    if not in_sl2_module(A, sd):
        return False
    a, b, c, dd = A.entries()
    D = sd.D
    for x, y in module_basis2(sd):
        xp, yp = x * a - y * b, -x * c + y * dd
        if not (sd.order_frac.contains(xp) and sd.lower.contains(yp)):
            return False
        for emb, (aa, bb, cc, ddd), var in (
            (lambda t: t, (a, b, c, dd), 1),
            (lambda t: t.conj(), (a.conj(), b.conj(), c.conj(), dd.conj()), 2),
        ):
            left = ZLinForm(D, emb(xp) * ddd + emb(yp) * bb) + ZLinForm.var(var, D, emb(xp) * cc + emb(yp) * aa)
            right = ZLinForm(D, emb(x)) + ZLinForm.var(var, D, emb(y))
            if left != right:
                return False
    return True


# ---------------------------------------------------------------------------
# symplectic module isomorphisms


def is_symplectic_module_iso(M: Mat2, a: QIdeal, b: QIdeal) -> bool:
    """M maps O + (1/sqrt D) a onto O + (1/sqrt D) b symplectically."""
    if a.norm() != b.norm():
        raise NormMismatch(f"norms {a.norm()} and {b.norm()} differ")
    D = a.D
    O = QOrder(D)
    s = QuadElem.sqrt(D)
    order = FracIdeal(D, [QuadElem(D, 1), O.gamma])
    ainv = ideal_inverse(a)
    bf = FracIdeal.from_ideal(b)
    return (
        M.det() == 1
        and order.contains(M.a)
        and ainv.scale(s).contains(M.b)
        and bf.scale(s.inverse()).contains(M.c)
        and (bf * ainv).contains(M.d)
    )
