"""Quadratic orders O_D = Z[g], g = (D + sqrt D)/2, and their ideals.

Elements of O_D are handled in coordinates (p, q) meaning p + q*g.  An
integral ideal is stored in the normal form <n, a + b*g> with b | a, b | n,
n | N(a + b*g)/b and 0 <= a < n.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import lattices as lat
from .errors import (
    ConductorDivides,
    DiscriminantMismatch,
    NotAnIdeal,
    NotCoprimeToConductor,
    NotInvertible,
    NotPrimitive,
    ParseError,
    WrongNorm,
    ZeroIdeal,
)
from .exact import QuadElem, check_disc, parse_quad


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of |n| (n != 0)."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def conductor(D: int) -> int:
    check_disc(D)
    f = 1
    for p, e in factorize(D).items():
        for k in range(e // 2, 0, -1):
            if (D // p ** (2 * k)) % 4 in (0, 1):
                f *= p**k
                break
    return f


def legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


class QOrder:
    """The order of discriminant D."""

    def __init__(self, D: int):
        self.D = check_disc(D)
        self.f = conductor(D)
        self.gamma = QuadElem.gamma(D)
        # g^2 = D*g - c0 with c0 = N(g)
        self.gnorm = (D * D - D) // 4

    def __eq__(self, other):
        return isinstance(other, QOrder) and other.D == self.D

    def __hash__(self):
        return hash(("QOrder", self.D))

    def __repr__(self):
        return f"QOrder({self.D})"

    def to_coords(self, x: QuadElem) -> tuple[Fraction, Fraction]:
        if x.D != self.D:
            raise DiscriminantMismatch(f"{x.D} != {self.D}")
        return (x.u - x.v * self.D, 2 * x.v)

    def from_coords(self, p, q) -> QuadElem:
        return QuadElem(self.D, p) + Fraction(q) * self.gamma

    def contains(self, x: QuadElem) -> bool:
        return all(c.denominator == 1 for c in self.to_coords(x))

    def elem(self, p=0, q=0) -> QuadElem:
        return self.from_coords(p, q)


def norm_of(D: int, a: int, b: int) -> int:
    """N(a + b*g) as an integer."""
    return a * a + a * b * D + b * b * (D * D - D) // 4


class QIdeal:
    """The integral ideal <n, a + b*g> of O_D."""

    __slots__ = ("D", "n", "a", "b")

    def __init__(self, D: int, n: int, a: int, b: int):
        check_disc(D)
        if n <= 0 or b <= 0:
            raise NotAnIdeal("n and b must be positive")
        if a % b or n % b or norm_of(D, a, b) % (b * n):
            raise NotAnIdeal(f"<{n}, {a} + {b}*g> violates the ideal conditions for D={D}")
        self.D, self.n, self.a, self.b = D, n, a % n, b

    @classmethod
    def unit(cls, D: int) -> QIdeal:
        return cls(D, 1, 0, 1)

    @property
    def order(self) -> QOrder:
        return QOrder(self.D)

    def generators(self) -> tuple[QuadElem, QuadElem]:
        O = QOrder(self.D)
        return (QuadElem(self.D, self.n), O.from_coords(self.a, self.b))

    def lattice(self) -> lat.QLattice:
        return lat.QLattice([[self.n, 0], [self.a, self.b]])

    def contains(self, x: QuadElem) -> bool:
        return self.lattice().contains(list(QOrder(self.D).to_coords(x)))

    def norm(self) -> int:
        return self.n * self.b

    def __eq__(self, other):
        if not isinstance(other, QIdeal):
            return NotImplemented
        return (self.D, self.n, self.a, self.b) == (other.D, other.n, other.a, other.b)

    def __hash__(self):
        return hash((self.D, self.n, self.a, self.b))

    def __mul__(self, other: QIdeal) -> QIdeal:
        return ideal_mul(self, other)

    def __repr__(self):
        return f"QIdeal(D={self.D}, n={self.n}, a={self.a}, b={self.b})"

    def __str__(self):
        return f"<{self.n}, {self.a} + {self.b}*g>"


def _ideal_from_coord_rows(D: int, rows: list[list[int]]) -> QIdeal:
    # column order (q, p) puts the HNF in the shape [[b, a], [0, n]]
    H = lat.hnf([[q, p] for p, q in rows])
    if not H:
        raise ZeroIdeal("generators span the zero ideal")
    if len(H) != 2:
        raise NotAnIdeal("generators do not span a rank-two lattice")
    (b, a), (_, n) = H
    return QIdeal(D, n, a, b)


def ideal_from_generators(gens: Iterable, O: QOrder | int) -> QIdeal:
    """The O_D-ideal generated by ``gens`` (integral elements)."""
    if isinstance(O, int):
        O = QOrder(O)
    rows = []
    for g in gens:
        if not isinstance(g, QuadElem):
            g = QuadElem(O.D, g)
        for h in (g, g * O.gamma):
            p, q = O.to_coords(h)
            if p.denominator != 1 or q.denominator != 1:
                raise NotAnIdeal(f"{g} is not integral over O_{O.D}")
            rows.append([int(p), int(q)])
    if all(r == [0, 0] for r in rows):
        raise ZeroIdeal("all generators vanish")
    return _ideal_from_coord_rows(O.D, rows)


def ideal_norm(I: QIdeal) -> int:
    return I.norm()


def is_primitive(I: QIdeal) -> bool:
    return I.b == 1


def is_invertible(I: QIdeal) -> bool:
    alpha, beta = I.generators()
    g = math.gcd(
        int(alpha.norm()), int(beta.norm()), int((alpha.conj() * beta).trace())
    )
    return g == I.norm()


def ideal_conj(I: QIdeal) -> QIdeal:
    alpha, beta = I.generators()
    return ideal_from_generators([alpha, beta.conj()], QOrder(I.D))


def ideal_mul(I: QIdeal, J: QIdeal) -> QIdeal:
    if I.D != J.D:
        raise DiscriminantMismatch(f"{I.D} != {J.D}")
    prods = [x * y for x in I.generators() for y in J.generators()]
    return ideal_from_generators(prods, QOrder(I.D))


def ideal_pow(I: QIdeal, k: int) -> QIdeal:
    out = QIdeal.unit(I.D)
    for _ in range(k):
        out = ideal_mul(out, I)
    return out


def scalar_ideal(D: int, m: int) -> QIdeal:
    return QIdeal(D, m, 0, m)


_IDEAL = re.compile(r"^\s*<\s*([^,]+),(.+)>\s*$")


def parse_ideal(text: str, D: int) -> QIdeal:
    """Parse ``<n, a + b*g>`` (any generators in the exact grammar are accepted)."""
    m = _IDEAL.match(text)
    if not m:
        raise ParseError(f"expected '<x, y>', got {text!r}")
    gens = [parse_quad(m.group(1), D), parse_quad(m.group(2), D)]
    return ideal_from_generators(gens, QOrder(D))


# ---------------------------------------------------------------------------
# fractional ideals


class FracIdeal:
    """A rank-two Z-lattice in Q(sqrt D), held in (1, g)-coordinates."""

    __slots__ = ("D", "lat")

    def __init__(self, D: int, gens: Sequence[QuadElem]):
        O = QOrder(D)
        rows = [list(O.to_coords(g)) for g in gens]
        L = lat.QLattice(rows, 2)
        if L.rank != 2:
            raise NotAnIdeal("fractional ideal needs rank two")
        self.D = D
        self.lat = L

    @classmethod
    def from_ideal(cls, I: QIdeal) -> FracIdeal:
        return cls(I.D, I.generators())

    def basis(self) -> list[QuadElem]:
        O = QOrder(self.D)
        return [O.from_coords(p, q) for p, q in self.lat.basis]

    def contains(self, x: QuadElem) -> bool:
        return self.lat.contains(list(QOrder(self.D).to_coords(x)))

    def coordinates(self, x: QuadElem) -> list[Fraction] | None:
        return self.lat.coordinates(list(QOrder(self.D).to_coords(x)))

    def scale(self, c) -> FracIdeal:
        return FracIdeal(self.D, [g * c for g in self.basis()])

    def conj(self) -> FracIdeal:
        return FracIdeal(self.D, [g.conj() for g in self.basis()])

    def __mul__(self, other):
        if isinstance(other, QIdeal):
            other = FracIdeal.from_ideal(other)
        if isinstance(other, FracIdeal):
            return FracIdeal(self.D, [x * y for x in self.basis() for y in other.basis()])
        return self.scale(other)

    __rmul__ = __mul__

    def is_subset(self, other: FracIdeal) -> bool:
        return all(other.contains(x) for x in self.basis())

    def __eq__(self, other):
        if isinstance(other, QIdeal):
            other = FracIdeal.from_ideal(other)
        if not isinstance(other, FracIdeal):
            return NotImplemented
        return self.D == other.D and self.lat == other.lat

    def __hash__(self):
        return hash((self.D, self.lat))

    def __repr__(self):
        return f"FracIdeal({self.D}, [{', '.join(str(b) for b in self.basis())}])"


def ideal_inverse(I: QIdeal) -> FracIdeal:
    if not is_invertible(I):
        raise NotInvertible(f"{I} is not invertible in O_{I.D}")
    return FracIdeal.from_ideal(ideal_conj(I)).scale(Fraction(1, I.norm()))


def inverse_different(I: QIdeal) -> FracIdeal:
    """The trace dual (1/sqrt D)(1/N(I)) I^sigma."""
    c = QuadElem.sqrt(I.D).inverse() * Fraction(1, I.norm())
    return FracIdeal.from_ideal(ideal_conj(I)).scale(c)


# ---------------------------------------------------------------------------
# splitting of primes and the prime factor condition


@dataclass(frozen=True)
class SplitType:
    tag: str  # "Inert" | "Split" | "Ramified"
    prime_ideal: QIdeal | None = None


def _smallest_root(O: QOrder, m: int) -> int | None:
    return next((c for c in range(m) if norm_of(O.D, c, 1) % m == 0), None)


def prime_splitting(p: int, O: QOrder | int) -> SplitType:
    if isinstance(O, int):
        O = QOrder(O)
    if O.f % p == 0:
        raise ConductorDivides(f"{p} divides the conductor {O.f}")
    D = O.D
    if p == 2:
        tag = "Ramified" if D % 2 == 0 else ("Split" if D % 8 == 1 else "Inert")
    else:
        tag = {0: "Ramified", 1: "Split", -1: "Inert"}[legendre(D, p)]
    if tag == "Inert":
        return SplitType(tag)
    c = _smallest_root(O, p)
    return SplitType(tag, QIdeal(D, p, c, 1))


def _check_coprime(d: int, O: QOrder):
    if math.gcd(d, O.f) != 1:
        raise NotCoprimeToConductor(f"gcd({d}, {O.f}) != 1")


def satisfies_pfc(d: int, O: QOrder | int) -> bool:
    if isinstance(O, int):
        O = QOrder(O)
    _check_coprime(d, O)
    if d == 1:
        return True
    for p, k in factorize(d).items():
        tag = prime_splitting(p, O).tag
        if tag == "Inert" or (tag == "Ramified" and k > 1):
            return False
    return True


def split_prime_count(d: int, O: QOrder) -> int:
    if d == 1:
        return 0
    return sum(1 for p in factorize(d) if prime_splitting(p, O).tag == "Split")


def primitive_ideals_of_norm(d: int, O: QOrder | int) -> list[QIdeal]:
    """All primitive ideals of norm d when the prime factor condition holds.

    For each split prime the ideal above it with the smaller residue is
    chosen before its conjugate.
    """
    if isinstance(O, int):
        O = QOrder(O)
    if not satisfies_pfc(d, O):
        return []
    if d == 1:
        return [QIdeal.unit(O.D)]
    choices = []
    for p, k in sorted(factorize(d).items()):
        st = prime_splitting(p, O)
        P = st.prime_ideal
        if st.tag == "Split":
            choices.append([ideal_pow(P, k), ideal_pow(ideal_conj(P), k)])
        else:
            choices.append([P])
    out = []
    for combo in itertools.product(*choices):
        I = QIdeal.unit(O.D)
        for J in combo:
            I = ideal_mul(I, J)
        assert I.b == 1 and I.norm() == d
        out.append(I)
    return out


def count_components(D: int, d: int) -> int:
    O = QOrder(D)
    if not satisfies_pfc(d, O):
        return 0
    return 2 ** split_prime_count(d, O)


# ---------------------------------------------------------------------------
# trace pairing and smart bases


def trace_pairing(v: Sequence[QuadElem], w: Sequence[QuadElem]) -> Fraction:
    """tr(x' y - x y') for v = (x, y), w = (x', y')."""
    x, y = v
    xt, yt = w
    return (xt * y - x * yt).trace()


def gram(vectors: Sequence[Sequence[QuadElem]]) -> list[list[Fraction]]:
    return [[trace_pairing(v, w) for w in vectors] for v in vectors]


def _integral_gram(vectors) -> list[list[int]]:
    G = gram(vectors)
    if any(x.denominator != 1 for row in G for x in row):
        raise ValueError("trace pairing is not integral on this lattice")
    return [[int(x) for x in row] for row in G]


def pairing_lattice(I: QIdeal, side: str) -> list[tuple[QuadElem, QuadElem]]:
    """A Z-basis of a ⊕ O^vee (side 'a+dual') or O ⊕ (1/sqrt D) a (side 'O+a')."""
    D = I.D
    zero = QuadElem(D)
    O = QOrder(D)
    rs = QuadElem.sqrt(D).inverse()
    a1, a2 = I.generators()
    if side == "a+dual":
        return [(a1, zero), (a2, zero), (zero, rs), (zero, O.gamma * rs)]
    if side == "O+a":
        return [(QuadElem(D, 1), zero), (O.gamma, zero), (zero, a1 * rs), (zero, a2 * rs)]
    raise ValueError(f"unknown side {side!r}")


def pairing_type(I: QIdeal, O: QOrder | None = None, side: str = "O+a") -> tuple[int, ...]:
    if O is not None and O.D != I.D:
        raise DiscriminantMismatch(f"{O.D} != {I.D}")
    return lat.symplectic_type(_integral_gram(pairing_lattice(I, side)))


def smart_basis(I: QIdeal, d: int | None = None) -> tuple[QuadElem, QuadElem]:
    """(eta1, eta2) = (1, a0 + g) with (eta2^sigma, d*eta1^sigma) a Z-basis of I."""
    if not is_primitive(I):
        raise NotPrimitive(f"{I} is not primitive")
    if d is not None and I.norm() != d:
        raise WrongNorm(f"{I} has norm {I.norm()}, not {d}")
    d = I.norm()
    O = QOrder(I.D)
    _check_coprime(d, O)
    a0 = (-(I.a + I.D)) % d
    return QuadElem(I.D, 1), O.from_coords(a0, 1)


def smart_pairing_basis(eta1: QuadElem, eta2: QuadElem, d: int):
    """((eta1,0), (eta2,0), (0, eta2^s/sqrt D), (0, -d eta1^s/sqrt D))."""
    D = eta1.D
    zero = QuadElem(D)
    rs = QuadElem.sqrt(D).inverse()
    return [
        (eta1, zero),
        (eta2, zero),
        (zero, eta2.conj() * rs),
        (zero, -d * eta1.conj() * rs),
    ]


def verify_smart_basis(I: QIdeal, eta1: QuadElem, eta2: QuadElem) -> dict[str, bool]:
    """The four defining checks of a smart basis, by name."""
    O = QOrder(I.D)
    d = I.norm()
    c1, c2 = O.to_coords(eta1), O.to_coords(eta2)
    order_basis = all(x.denominator == 1 for x in c1 + c2) and abs(
        c1[0] * c2[1] - c1[1] * c2[0]
    ) == 1
    ideal_basis = FracIdeal(I.D, [eta2.conj(), d * eta1.conj()]) == FracIdeal.from_ideal(I)
    sign = (eta1 * eta2.conj()).antiinv() == Fraction(-1, 2)
    try:
        G = gram(smart_pairing_basis(eta1, eta2, d))
        symplectic = G == lat.standard_form((1, d))
    except Exception:
        symplectic = False
    return {
        "order_basis": order_basis,
        "ideal_basis": ideal_basis,
        "sign_convention": sign,
        "symplectic_gram": symplectic,
    }


def is_smart_basis(I: QIdeal, eta1: QuadElem, eta2: QuadElem) -> bool:
    return all(verify_smart_basis(I, eta1, eta2).values())


def ideal_of_smart_basis(eta1: QuadElem, eta2: QuadElem, d: int) -> QIdeal:
    """The ideal spanned by (eta2^sigma, d*eta1^sigma)."""
    O = QOrder(eta1.D)
    rows = []
    for x in (eta2.conj(), d * eta1.conj()):
        p, q = O.to_coords(x)
        if p.denominator != 1 or q.denominator != 1:
            raise NotAnIdeal("smart basis elements must be integral")
        rows.append([int(p), int(q)])
    return _ideal_from_coord_rows(O.D, rows)
