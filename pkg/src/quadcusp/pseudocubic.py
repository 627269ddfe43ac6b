"""Lattices in F = Q(sqrt D) + Q, their duals and coefficient rings, and
extension classes of self-adjoint endomorphisms.

Everything is expressed in the fixed Q-basis e = ((1,0), (sqrt D,0), (0,1)) of F.
In that basis the pseudo-trace form tr_p(xy) has Gram matrix G = diag(2, 2D, 1),
and an element of F^2 is a vector in Q^6 (first factor, then second).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import lattices as lat
from .errors import DegenerateLine, DiscriminantMismatch, DomainError, NotSmartBasis, SingularGram
from .exact import PCElem, QuadElem, check_disc
from .lattices import Matrix, QLattice
from .orders import QIdeal, QOrder, ideal_of_smart_basis, is_smart_basis


def gram_e(D: int) -> Matrix:
    return [[Fraction(2), Fraction(0), Fraction(0)],
            [Fraction(0), Fraction(2 * D), Fraction(0)],
            [Fraction(0), Fraction(0), Fraction(1)]]


def _vec(x: PCElem) -> list[Fraction]:
    return list(x.coords())


def _elem(D: int, v: Sequence) -> PCElem:
    return PCElem.from_coords(D, v)


def _is_zero(M: Matrix) -> bool:
    return all(x == 0 for row in M for x in row)


def _madd(A: Matrix, B: Matrix, k=1) -> Matrix:
    return [[a + k * b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


# ---------------------------------------------------------------------------
# lattices in F


class FLattice:
    """A full-rank lattice in F, canonical via the HNF of its e-coordinates."""

    __slots__ = ("D", "lattice")

    def __init__(self, D: int, gens: Sequence[PCElem | Sequence]):
        self.D = check_disc(D)
        rows = []
        for g in gens:
            if isinstance(g, PCElem):
                if g.D != D:
                    raise DiscriminantMismatch(f"{g.D} != {D}")
                rows.append(_vec(g))
            else:
                rows.append([Fraction(c) for c in g])
        self.lattice = QLattice(rows, 3)
        if self.lattice.rank != 3:
            raise DomainError("generators do not span F over Q")

    @classmethod
    def _from_qlattice(cls, D: int, L: QLattice) -> FLattice:
        return cls(D, L.basis)

    @property
    def basis(self) -> list[PCElem]:
        return [_elem(self.D, row) for row in self.lattice.basis]

    @property
    def basis_matrix(self) -> Matrix:
        return self.lattice.basis

    def contains(self, x: PCElem) -> bool:
        return self.lattice.contains(_vec(x))

    def coordinates(self, x: PCElem) -> list[Fraction]:
        return self.lattice.coordinates(_vec(x))

    def contains_lattice(self, other: FLattice) -> bool:
        return self.lattice.contains_lattice(other.lattice)

    def scale(self, a: PCElem) -> FLattice:
        return FLattice(self.D, [a * b for b in self.basis])

    __rmul__ = scale

    def __add__(self, other: FLattice) -> FLattice:
        return FLattice._from_qlattice(self.D, self.lattice + other.lattice)

    def covolume(self) -> Fraction:
        return abs(Fraction(lat.det(self.basis_matrix)))

    def __eq__(self, other):
        if not isinstance(other, FLattice):
            return NotImplemented
        return self.D == other.D and self.lattice == other.lattice

    def __hash__(self):
        return hash((self.D, self.lattice))

    def __repr__(self):
        return f"FLattice(D={self.D}, basis=[{', '.join(map(str, self.basis))}])"


class PCOrder(FLattice):
    """A lattice in F that is a unital ring; closure is checked on construction."""

    __slots__ = ()

    def __init__(self, D: int, gens):
        super().__init__(D, gens)
        if not self.contains(PCElem.one(D)):
            raise DomainError("lattice does not contain (1,1)")
        B = self.basis
        if not all(self.contains(x * y) for x in B for y in B):
            raise DomainError("lattice is not closed under multiplication")

    def __repr__(self):
        return f"PCOrder(D={self.D}, basis=[{', '.join(map(str, self.basis))}])"


def maximal_split_order(D: int) -> PCOrder:
    """O_D + Z."""
    return PCOrder(D, [PCElem(QuadElem(D, 1), 0), PCElem(QuadElem.gamma(D), 0), PCElem.make(D, 0, 0, 1)])


def pc_order_from_ideal(a: QIdeal) -> PCOrder:
    """O_a = a x {0} + Z(1,1)."""
    D = a.D
    gens = [PCElem(g, 0) for g in a.generators()]
    return PCOrder(D, gens + [PCElem.one(D)])


def pc_order_degree(O: PCOrder) -> int:
    idx = O.covolume() / maximal_split_order(O.D).covolume()
    if idx.denominator != 1:
        raise DomainError("order is not contained in O_D + Z")
    return int(idx)


def gram_of(I: FLattice) -> Matrix:
    B = I.basis
    return [[(x * y).trp() for y in B] for x in B]


def dual_lattice(I: FLattice) -> FLattice:
    """{x in F : tr_p(x I) in Z}, via the inverse transpose of the basis."""
    R = I.basis_matrix
    G = gram_e(I.D)
    # rows s_j with R G s_j^T = delta
    S = lat.transpose(lat.inverse(lat.matmul(R, G)))
    return FLattice(I.D, S)


def dual_basis_of(rs: Sequence[PCElem]) -> list[PCElem]:
    D = rs[0].D
    R = [_vec(r) for r in rs]
    M = lat.matmul(R, gram_e(D))
    if lat.det(M) == 0:
        raise SingularGram("elements do not form a Q-basis of F")
    S = lat.transpose(lat.inverse(M))
    return [_elem(D, row) for row in S]


# ---------------------------------------------------------------------------
# endomorphisms


def mult_matrix(x: PCElem) -> Matrix:
    """Multiplication by x in the basis e (columns are images of e_k)."""
    a, b, r = x.coords()
    D = x.D
    z = Fraction(0)
    return [[a, b * D, z], [b, a, z], [z, z, r]]


def _apply(H: Matrix, x: PCElem) -> PCElem:
    return _elem(x.D, lat.matvec(H, _vec(x)))


class HMap:
    """A tr_p-self-adjoint Q-endomorphism of F, stored as its matrix in basis e."""

    __slots__ = ("D", "H")

    def __init__(self, D: int, H: Sequence[Sequence]):
        self.D = check_disc(D)
        self.H = [[Fraction(c) for c in row] for row in H]
        GH = lat.matmul(gram_e(D), self.H)
        if GH != lat.transpose(GH):
            raise DomainError("map is not self-adjoint for the pseudo-trace form")

    @classmethod
    def zero(cls, D: int) -> HMap:
        return cls(D, lat.zeros(3, 3))

    @classmethod
    def mult(cls, x: PCElem) -> HMap:
        return cls(x.D, mult_matrix(x))

    @classmethod
    def from_tensor(cls, D: int, T: Sequence[Sequence]) -> HMap:
        """The map y -> sum t_ij tr_p(e_i y) e_j of a symmetric tensor sum t_ij e_i (x) e_j."""
        return cls(D, lat.matmul([[Fraction(c) for c in row] for row in T], gram_e(D)))

    @classmethod
    def from_elements(cls, pairs) -> HMap:
        """Sum of c * (x (x) y + y (x) x) / 2 over (c, x, y)."""
        pairs = list(pairs)
        D = pairs[0][1].D
        T = lat.zeros(3, 3)
        for c, x, y in pairs:
            u, v = _vec(x), _vec(y)
            for i in range(3):
                for j in range(3):
                    T[i][j] += Fraction(c) * (u[i] * v[j] + v[i] * u[j]) / 2
        return cls.from_tensor(D, T)

    def tensor(self) -> Matrix:
        return lat.matmul(self.H, lat.inverse(gram_e(self.D)))

    def __call__(self, x: PCElem) -> PCElem:
        return _apply(self.H, x)

    def __add__(self, other: HMap) -> HMap:
        return HMap(self.D, _madd(self.H, other.H))

    def __sub__(self, other: HMap) -> HMap:
        return HMap(self.D, _madd(self.H, other.H, -1))

    def __neg__(self) -> HMap:
        return HMap(self.D, [[-c for c in row] for row in self.H])

    def __mul__(self, k) -> HMap:
        k = Fraction(k)
        return HMap(self.D, [[k * c for c in row] for row in self.H])

    __rmul__ = __mul__

    def twist(self, a: PCElem) -> HMap:
        """x -> a h(a x)."""
        Ma = mult_matrix(a)
        return HMap(self.D, lat.matmul(Ma, lat.matmul(self.H, Ma)))

    def __eq__(self, other):
        if not isinstance(other, HMap):
            return NotImplemented
        return self.D == other.D and self.H == other.H

    def __hash__(self):
        return hash((self.D, tuple(map(tuple, self.H))))

    def __repr__(self):
        return f"HMap(D={self.D}, H={[[str(c) for c in row] for row in self.H]})"


def commutator_action(x: PCElem, h: HMap) -> Matrix:
    """[M_x, h] as a matrix; it is anti-self-adjoint for tr_p."""
    Mx = mult_matrix(x)
    return _madd(lat.matmul(Mx, h.H), lat.matmul(h.H, Mx), -1)


def eh_action(x: PCElem, pair: tuple[PCElem, PCElem], h: HMap) -> tuple[PCElem, PCElem]:
    lam, mu = pair
    return (x * lam + _apply(commutator_action(x, h), mu), x * mu)


def symplectic_pairing(v: tuple[PCElem, PCElem], w: tuple[PCElem, PCElem]) -> Fraction:
    """<(x1,y1),(x2,y2)>_p = tr_p(x2 y1 - x1 y2)."""
    (x1, y1), (x2, y2) = v, w
    return (x2 * y1 - x1 * y2).trp()


def _coords_in(R_inv: Matrix, v: Sequence) -> list:
    return lat.vecmat(v, R_inv)


def _ring_conditions(I: FLattice) -> list[list[Fraction]]:
    """Rows c with (c . t) integral for all rows <=> x = sum t_k e_k maps I into I."""
    D = I.D
    R = I.basis_matrix
    R_inv = lat.inverse(R)
    unit = [_elem(D, row) for row in lat.identity(3)]
    images = [[_coords_in(R_inv, _vec(e * r)) for e in unit] for r in I.basis]
    rows = []
    for per_r in images:
        for j in range(3):
            rows.append([per_r[k][j] for k in range(3)])
    return rows


def _commutator_conditions(I: FLattice, h: HMap) -> list[list[Fraction]]:
    D = I.D
    R_inv = lat.inverse(I.basis_matrix)
    dual = dual_lattice(I).basis
    unit = [_elem(D, row) for row in lat.identity(3)]
    rows = []
    for s in dual:
        imgs = [_coords_in(R_inv, lat.matvec(commutator_action(e, h), _vec(s))) for e in unit]
        for j in range(3):
            rows.append([imgs[k][j] for k in range(3)])
    return rows


def _order_from_conditions(D: int, rows) -> PCOrder:
    basis = lat.preimage_lattice(rows)
    return PCOrder(D, basis)


def coefficient_ring(I: FLattice) -> PCOrder:
    """{x in F : x I in I}."""
    return _order_from_conditions(I.D, _ring_conditions(I))


def o_h(I: FLattice, h: HMap) -> PCOrder:
    """{x in O(I) : [M_x, h](I^dual) in I}."""
    if h.D != I.D:
        raise DiscriminantMismatch(f"{h.D} != {I.D}")
    return _order_from_conditions(I.D, _ring_conditions(I) + _commutator_conditions(I, h))


# ---------------------------------------------------------------------------
# extension classes
#
# Symmetric tensors T (3x3 symmetric, basis e) split orthogonally into the
# F-linear part spanned by LAMBDA and its complement spanned by MU.


def lambda_basis(D: int) -> list[Matrix]:
    F = Fraction
    return [
        [[F(1), F(0), F(0)], [F(0), F(1, D), F(0)], [F(0), F(0), F(0)]],
        [[F(0), F(1), F(0)], [F(1), F(0), F(0)], [F(0), F(0), F(0)]],
        [[F(0), F(0), F(0)], [F(0), F(0), F(0)], [F(0), F(0), F(1)]],
    ]


def mu_basis(D: int) -> list[Matrix]:
    F = Fraction
    h = F(1, 2)
    return [
        [[F(-D, 4), F(0), F(0)], [F(0), F(1, 4), F(0)], [F(0), F(0), F(0)]],
        [[F(0), F(0), h], [F(0), F(0), F(0)], [h, F(0), F(0)]],
        [[F(0), F(0), F(0)], [F(0), F(0), h], [F(0), h, F(0)]],
    ]


def tensor_inner(D: int, T: Matrix, S: Matrix) -> Fraction:
    """<x1(x)x2, y1(x)y2> = tr_p(x1 y1) tr_p(x2 y2), extended bilinearly."""
    g = (2, 2 * D, 1)
    return sum(T[i][j] * S[i][j] * g[i] * g[j] for i in range(3) for j in range(3))


_SYM_INDEX = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def _sym_vec(T: Matrix) -> list[Fraction]:
    return [Fraction(T[i][j]) for i, j in _SYM_INDEX]


def split_tensor(D: int, T: Matrix) -> tuple[list[Fraction], list[Fraction]]:
    """Coordinates (a, q) with T = sum a_i lambda_i + sum q_i mu_i."""
    cols = [_sym_vec(B) for B in lambda_basis(D) + mu_basis(D)]
    A = lat.transpose(cols)
    sol = lat.matvec(lat.inverse(A), _sym_vec(T))
    return sol[:3], sol[3:]


def complement_coords(h: HMap) -> list[Fraction]:
    return split_tensor(h.D, h.tensor())[1]


def integral_self_adjoint_generators(I: FLattice) -> list[Matrix]:
    """Tensor generators of the maps sending I^dual into I: r_i(x)r_j + r_j(x)r_i and r_i(x)r_i."""
    R = I.basis_matrix
    gens = []
    for i in range(3):
        for j in range(i, 3):
            T = lat.zeros(3, 3)
            for k in range(3):
                for l in range(3):
                    T[k][l] = R[i][k] * R[j][l] + (R[j][k] * R[i][l] if i != j else 0)
            gens.append(T)
    return gens


def integral_self_adjoint(I: FLattice, b: Sequence[Sequence]) -> HMap:
    """sum b_ij r_i (x) r_j for a symmetric integer matrix b."""
    R = I.basis_matrix
    T = lat.matmul(lat.transpose(R), lat.matmul([[Fraction(c) for c in row] for row in b], R))
    return HMap.from_tensor(I.D, T)


def maps_dual_into(h: HMap, I: FLattice) -> bool:
    return all(I.contains(h(s)) for s in dual_lattice(I).basis)


def extension_class_equal(h1: HMap, h2: HMap, I: FLattice) -> bool:
    """h1 - h2 in Hom_F(F,F) + {self-adjoint f with f(I^dual) in I}."""
    D = I.D
    q = complement_coords(h1 - h2)
    proj = QLattice([split_tensor(D, T)[1] for T in integral_self_adjoint_generators(I)], 3)
    return proj.contains(q)


def baer_sum(h1: HMap, h2: HMap) -> HMap:
    return h1 + h2


# ---------------------------------------------------------------------------
# lattices in F^2


def pair_vec(v: tuple[PCElem, PCElem]) -> list[Fraction]:
    return _vec(v[0]) + _vec(v[1])


def vec_pair(D: int, w: Sequence) -> tuple[PCElem, PCElem]:
    return (_elem(D, w[:3]), _elem(D, w[3:]))


class FPairLattice:
    """A rank-6 lattice in F^2 = Q^6 (e-coordinates of both factors)."""

    __slots__ = ("D", "lattice", "generators")

    def __init__(self, D: int, gens: Sequence[tuple[PCElem, PCElem]]):
        self.D = check_disc(D)
        self.generators = [tuple(g) for g in gens]
        self.lattice = QLattice([pair_vec(g) for g in self.generators], 6)
        if self.lattice.rank != 6:
            raise DomainError("generators do not have full rank in F^2")

    def contains(self, v: tuple[PCElem, PCElem]) -> bool:
        return self.lattice.contains(pair_vec(v))

    def gram(self) -> Matrix:
        g = self.generators
        return [[symplectic_pairing(x, y) for y in g] for x in g]

    def __eq__(self, other):
        if not isinstance(other, FPairLattice):
            return NotImplemented
        return self.D == other.D and self.lattice == other.lattice

    def __hash__(self):
        return hash((self.D, self.lattice))


def standard_symplectic_module(D: int, d: int, eta1: QuadElem, eta2: QuadElem) -> FPairLattice:
    """The module with the six generators listed column-wise, in order."""
    try:
        a = ideal_of_smart_basis(eta1, eta2, d)
        ok = a.norm() == d and is_smart_basis(a, eta1, eta2)
    except DomainError:
        ok = False
    if not ok:
        raise NotSmartBasis("(eta1, eta2) is not a smart basis for norm d")
    rs = QuadElem.sqrt(D).inverse()
    z = QuadElem(D)
    P = lambda x, q=0: PCElem(x, q)  # noqa: E731
    gens = [
        (P(eta1), P(z)),
        (P(eta2), P(z)),
        (P(z, 1), P(z)),
        (P(z), P(eta2.conj() * rs)),
        (P(z, Fraction(1, d)), P(-eta1.conj() * rs)),
        (P(eta2 / d), P(z, -1)),
    ]
    return FPairLattice(D, gens)


def cusp_line_lattice(v: tuple[PCElem, PCElem], M: FPairLattice) -> QLattice:
    """The saturated lattice M intersected with the F-line through v, in Q^6."""
    v1, v2 = v
    if not (v1.x or v2.x) or not (v1.q or v2.q):
        raise DegenerateLine("line does not span a three-dimensional subspace")
    D = M.D
    unit = [_elem(D, row) for row in lat.identity(3)]
    span = [pair_vec((e * v1, e * v2)) for e in unit]
    L = lat.intersect_subspace(M.lattice, span)
    if L.rank != 3:
        raise DegenerateLine("line meets the module in rank other than three")
    return L
