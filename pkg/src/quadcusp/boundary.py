"""Weighted boundary strata: the admissibility test, dual bases, exponent
lattices and the cross-ratio equations cutting out the loci S(h).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import lattices as lat
from .errors import (
    CoincidentPoints,
    DiscriminantMismatch,
    DomainError,
    NegativeDiscriminant,
    ParseError,
    PhaseNotRepresentable,
    UnsupportedStratum,
)
from .exact import PCElem, format_rat, parse_rat
from .pseudocubic import dual_basis_of

QVec3 = tuple[Fraction, Fraction, Fraction]


def q_map(w: PCElem) -> QVec3:
    """(N(sqrt D x), tr(x) q, tr(sqrt D x) q) for w = (x, q), x = r + s sqrt D."""
    D = w.D
    if D <= 0:
        raise NegativeDiscriminant("the quadratic map needs D > 0")
    r, s, q = w.coords()
    return (s * s * D * D - r * r * D, 2 * r * q, 2 * s * D * q)


def _dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


# ---------------------------------------------------------------------------
# weightings


@dataclass(frozen=True)
class Weighting:
    """Weights of a trinodal stratum (r1, r2, r3), or of a nice non-trinodal
    stratum with components carrying (r1, r3) and (r2, r3)."""

    kind: str
    r: tuple[PCElem, PCElem, PCElem]

    def __post_init__(self):
        if self.kind not in ("trinodal", "nontrinodal"):
            raise UnsupportedStratum(f"stratum type {self.kind!r} is not modelled")
        if len(self.r) != 3:
            raise DomainError("three weights expected")
        if any(not w for w in self.r):
            raise DomainError("weights must be nonzero")
        if len({w.D for w in self.r}) != 1:
            raise DiscriminantMismatch("weights live in different fields")

    @classmethod
    def trinodal(cls, r1: PCElem, r2: PCElem, r3: PCElem) -> Weighting:
        return cls("trinodal", (r1, r2, r3))

    @classmethod
    def nontrinodal(cls, comp1: tuple[PCElem, PCElem], comp2: tuple[PCElem, PCElem]) -> Weighting:
        (r1, r3), (r2, r3b) = comp1, comp2
        if r3 != r3b:
            raise DomainError("both components must share the weight r3")
        return cls("nontrinodal", (r1, r2, r3))

    @property
    def D(self) -> int:
        return self.r[0].D

    def weights(self) -> list[PCElem]:
        """All cusp weights; each r_i occurs with both signs."""
        return [s * w for w in self.r for s in (1, -1)]

    def components(self):
        if self.kind == "trinodal":
            return [list(self.weights())]
        r1, r2, r3 = self.r
        return [[r1, -r1, r3, -r3], [r2, -r2, r3, -r3]]

    def is_basis(self) -> bool:
        return lat.rank([list(w.coords()) for w in self.r]) == 3


# ---------------------------------------------------------------------------
# exact cone geometry


def _row_space_basis(vectors: Sequence[Sequence]) -> list[list[Fraction]]:
    """A reduced-echelon basis of span_Q(vectors)."""
    A = [[Fraction(x) for x in v] for v in vectors]
    out = []
    n = len(A[0]) if A else 0
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
    out = A[:r]
    return out


def cone_rays(A: Sequence[Sequence]) -> list[list[Fraction]]:
    """Extreme rays of the pointed cone {c : A c >= 0}, A of full column rank.

    Double description: start from a simplicial cone on k independent rows,
    then add the remaining inequalities one at a time.
    """
    A = [[Fraction(x) for x in row] for row in A]
    k = len(A[0])
    # pick k independent rows
    chosen: list[int] = []
    for i in range(len(A)):
        if lat.rank([A[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
        if len(chosen) == k:
            break
    if len(chosen) < k:
        raise DomainError("constraint matrix is not of full column rank")
    inv = lat.inverse([A[i] for i in chosen])
    rays = [[inv[r][c] for r in range(k)] for c in range(k)]
    used = list(chosen)
    for i in range(len(A)):
        if i in chosen:
            continue
        a = A[i]
        vals = [_dot(a, r) for r in rays]
        pos = [r for r, v in zip(rays, vals) if v > 0]
        zero = [r for r, v in zip(rays, vals) if v == 0]
        neg = [(r, v) for r, v in zip(rays, vals) if v < 0]
        new = pos + zero
        used.append(i)
        for rp, vp in [(r, v) for r, v in zip(rays, vals) if v > 0]:
            for rn, vn in neg:
                if not _adjacent(rp, rn, [A[j] for j in used[:-1]], rays, k):
                    continue
                c = [vp * y - vn * x for x, y in zip(rp, rn)]
                new.append(_normalize_ray(c))
        rays = _dedupe(new)
    return rays


def _adjacent(r1, r2, rows, rays, k) -> bool:
    tight = [a for a in rows if _dot(a, r1) == 0 and _dot(a, r2) == 0]
    if k == 1:
        return True
    return len(tight) > 0 and lat.rank(tight) == k - 2 if k > 2 else True


def _normalize_ray(v: Sequence[Fraction]) -> list[Fraction]:
    den = lat.common_denominator([v])
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints) or 1
    return [Fraction(x // g) for x in ints]


def _dedupe(rays):
    seen, out = set(), []
    for r in rays:
        key = tuple(_normalize_ray(r))
        if any(x != 0 for x in key) and key not in seen:
            seen.add(key)
            out.append(list(key))
    return out


@dataclass
class AdmissibilityResult:
    admissible: bool
    images: list[QVec3]
    span: list[list[Fraction]]
    rays: list[list[Fraction]]
    interior_combination: list[Fraction] | None
    separating_functional: list[Fraction] | None

    def __bool__(self):
        return self.admissible

    def check_certificate(self) -> bool:
        if self.admissible:
            lam = self.interior_combination
            if lam is None or any(x <= 0 for x in lam):
                return False
            total = [sum(l * q[i] for l, q in zip(lam, self.images)) for i in range(3)]
            return all(t == 0 for t in total)
        v = self.separating_functional
        pairs = [_dot(v, q) for q in self.images]
        return all(p >= 0 for p in pairs) and any(p > 0 for p in pairs)


def _interior_combination(images: list[QVec3], dimV: int) -> list[Fraction] | None:
    """Positive weights with sum lambda_i Q_i = 0, found exactly via
    -sum Q_i = sum mu_i Q_i with mu >= 0 supported on an independent subset."""
    target = [-sum(q[i] for q in images) for i in range(3)]
    n = len(images)
    if all(t == 0 for t in target):
        return [Fraction(1)] * n
    for size in range(1, dimV + 1):
        for sub in itertools.combinations(range(n), size):
            M = [list(images[j]) for j in sub]
            if lat.rank(M) != size:
                continue
            aug = [[M[c][row] for c in range(size)] + [target[row]] for row in range(3)]
            sol = lat._solve_consistent(aug, size)
            if sol is None or any(x < 0 for x in sol):
                continue
            lam = [Fraction(1)] * n
            for j, x in zip(sub, sol):
                lam[j] += x
            return lam
    return None


def admissibility(weights: Iterable[PCElem]) -> AdmissibilityResult:
    """0 in the relative interior of conv{Q(w)}, decided by the dual cone."""
    weights = list(weights)
    images = [q_map(w) for w in weights]
    V = _row_space_basis(images)
    if not V:
        return AdmissibilityResult(True, images, [], [], [Fraction(1)] * len(images), None)
    # c parametrises v = c V; constraints <c V, Q_i> >= 0
    A = [[_dot(b, q) for b in V] for q in images]
    rays = [[sum(c * b[i] for c, b in zip(ray, V)) for i in range(3)] for ray in cone_rays(A)]
    if rays:
        return AdmissibilityResult(False, images, V, rays, None, rays[0])
    lam = _interior_combination(images, len(V))
    if lam is None:  # cannot happen when the dual cone is trivial
        raise AssertionError("no interior combination despite trivial dual cone")
    return AdmissibilityResult(True, images, V, [], lam, None)


def is_admissible(W: Weighting | Iterable[PCElem]) -> bool:
    weights = W.weights() if isinstance(W, Weighting) else list(W)
    return admissibility(weights).admissible


# ---------------------------------------------------------------------------
# dual bases and exponent lattices


def dual_basis(r1: PCElem, r2: PCElem, r3: PCElem) -> tuple[PCElem, PCElem, PCElem]:
    """(s1, s2, s3) with tr_p(r_i s_j) = delta_ij."""
    return tuple(dual_basis_of([r1, r2, r3]))


def exponent_lattice(s1: PCElem, s2: PCElem, s3: PCElem) -> list[list[int]]:
    """Integer solutions a of a1 s2 s3 + a2 s1 s3 + a3 s1 s2 = 0, as HNF rows."""
    cols = [list((s2 * s3).coords()), list((s1 * s3).coords()), list((s1 * s2).coords())]
    M = lat.transpose(cols)
    return [list(map(int, row)) for row in lat.integer_kernel(M)]


def _orient(v: Sequence[int]) -> list[int]:
    """Sign-normalise so that the last nonzero entry is positive."""
    v = list(v)
    last = next((x for x in reversed(v) if x), 0)
    return [-x for x in v] if last < 0 else v


def phase_mod1(q) -> Fraction:
    q = Fraction(q)
    return q - math.floor(q)


@dataclass(frozen=True)
class CrossRatioEq:
    """p23^a1 * p13^a2 * p12^a3 = exp(-2 pi i phase); for non-trinodal strata
    the p12 factor is absent (its value is identically 1)."""

    exponents: tuple[int, int, int]
    phase: Fraction
    stratum: str = "trinodal"

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(a) for a in self.exponents))
        object.__setattr__(self, "phase", phase_mod1(self.phase))

    def symbolic_phase(self) -> str:
        a1, a2, a3 = self.exponents
        terms = [(a1, "b23"), (a2, "b13"), (a3, "b12")]
        parts = []
        for c, name in sorted([t for t in terms if t[0]], key=lambda t: -t[0]):
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append((sign, mag + name))
        if not parts:
            return "0"
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += sign + body
        return s

    def monomial(self) -> str:
        """Numerator/denominator form such as p12/p23."""
        a1, a2, a3 = self.exponents
        bar = "pbar" if self.stratum == "nontrinodal" else "p"
        factors = [(a1, f"{bar}23"), (a2, f"{bar}13")]
        if self.stratum == "trinodal":
            factors.append((a3, "p12"))
        num = [f"{n}^{c}" if c > 1 else n for c, n in reversed(factors) if c > 0]
        den = [f"{n}^{-c}" if c < -1 else n for c, n in reversed(factors) if c < 0]
        top = " * ".join(num) or "1"
        return top + ("/" + "/".join(den) if den else "")

    def pretty(self) -> str:
        sym = self.symbolic_phase()
        return f"{self.monomial()} = e(-({sym}))"

    def __str__(self):
        a1, a2, a3 = self.exponents
        bar = "pbar" if self.stratum == "nontrinodal" else "p"
        lhs = f"{bar}23^{a1} * {bar}13^{a2}"
        if self.stratum == "trinodal":
            lhs += f" * p12^{a3}"
        return f"{lhs} = e(-{format_rat(self.phase)})"

    def to_json(self) -> dict:
        return {
            "exponents": list(self.exponents),
            "phase_num": str(self.phase.numerator),
            "phase_den": str(self.phase.denominator),
            "stratum": self.stratum,
        }

    @classmethod
    def from_json(cls, obj) -> CrossRatioEq:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(obj["exponents"]), Fraction(int(obj["phase_num"]), int(obj["phase_den"])),
                   obj.get("stratum", "trinodal"))

    @classmethod
    def parse(cls, text: str) -> CrossRatioEq:
        try:
            lhs, rhs = text.split("=")
            rhs = rhs.strip()
            if not (rhs.startswith("e(-") and rhs.endswith(")")):
                raise ValueError
            phase = parse_rat(rhs[3:-1])
            ex = {}
            stratum = "nontrinodal" if "pbar" in lhs else "trinodal"
            for f in lhs.split("*"):
                name, a = f.strip().split("^")
                ex[name.replace("pbar", "p")] = int(a)
            exps = (ex.get("p23", 0), ex.get("p13", 0), ex.get("p12", 0))
        except (ValueError, KeyError) as exc:
            raise ParseError(f"cannot parse equation {text!r}") from exc
        return cls(exps, phase, stratum)


def _sym(b: Sequence[Sequence]) -> list[list[Fraction]]:
    b = [[Fraction(x) for x in row] for row in b]
    if any(b[i][j] != b[j][i] for i in range(3) for j in range(3)):
        raise DomainError("h-coefficient matrix must be symmetric")
    return b


def _equations(W: Weighting, b, stratum: str) -> list[CrossRatioEq]:
    b = _sym(b)
    s = dual_basis(*W.r)
    out = []
    for v in exponent_lattice(*s):
        a1, a2, a3 = _orient(v)
        phase = a1 * b[1][2] + a2 * b[0][2] + a3 * b[0][1]
        out.append(CrossRatioEq((a1, a2, a3), phase, stratum))
    return out


def cross_ratio_equations(W: Weighting, b) -> list[CrossRatioEq]:
    if W.kind != "trinodal":
        raise UnsupportedStratum("cross_ratio_equations needs a trinodal stratum")
    return _equations(W, b, "trinodal")


def nontrinodal_equations(W: Weighting, b) -> list[CrossRatioEq]:
    if W.kind != "nontrinodal":
        raise UnsupportedStratum("nontrinodal_equations needs a nice non-trinodal stratum")
    return _equations(W, b, "nontrinodal")


# ---------------------------------------------------------------------------
# tensors of dual functionals


def tensor_pairing(terms: Iterable[tuple], w: PCElem) -> Fraction:
    """<a, w (x) w> for a = sum c [tr_p(x .) (x) tr_p(y .)] given as (c, x, y)."""
    total = Fraction(0)
    for c, x, y in terms:
        total += Fraction(c) * (x * w).trp() * (y * w).trp()
    return total


def s_tensor(s: Sequence[PCElem], coeffs: dict) -> list[tuple]:
    """The combination sum c_jk s_j (x) s_k (indices 1-based)."""
    return [(c, s[j - 1], s[k - 1]) for (j, k), c in coeffs.items()]


# ---------------------------------------------------------------------------
# exact points of the projective line


class GaussRat:
    """x + i y with rational x, y."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _c(o):
        if isinstance(o, GaussRat):
            return o
        if isinstance(o, (int, Fraction)):
            return GaussRat(o)
        return NotImplemented

    def __add__(self, o):
        o = self._c(o)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, o):
        o = self._c(o)
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conj(self) -> GaussRat:
        return GaussRat(self.re, -self.im)

    def inverse(self) -> GaussRat:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of 0")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * self._c(o).inverse()

    def __rtruediv__(self, o):
        return self._c(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = GaussRat(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        o = self._c(o)
        if o is NotImplemented:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return format_rat(self.re)
        return f"{format_rat(self.re)}{'+' if self.im >= 0 else '-'}{format_rat(abs(self.im))}*i"


class ProjPoint:
    """A point of P^1: infinity or a Gaussian rational."""

    __slots__ = ("value",)

    def __init__(self, value=None):
        if value is not None and not isinstance(value, GaussRat):
            value = GaussRat(value)
        self.value = value

    @classmethod
    def infinity(cls) -> ProjPoint:
        return cls(None)

    @classmethod
    def of(cls, re=0, im=0) -> ProjPoint:
        return cls(GaussRat(re, im))

    @property
    def is_infinity(self) -> bool:
        return self.value is None

    def mobius(self, a, b, c, d) -> ProjPoint:
        """(a z + b)/(c z + d) with Gaussian-rational coefficients, ad - bc != 0."""
        a, b, c, d = (GaussRat._c(x) for x in (a, b, c, d))
        if not a * d - b * c:
            raise DomainError("degenerate Mobius map")
        if self.is_infinity:
            return ProjPoint(a / c) if c else ProjPoint.infinity()
        den = c * self.value + d
        if not den:
            return ProjPoint.infinity()
        return ProjPoint((a * self.value + b) / den)

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        return self.value == other.value if self.value is not None and other.value is not None \
            else self.value is None and other.value is None

    def __hash__(self):
        return hash(self.value)

    def __repr__(self):
        return "ProjPoint(oo)" if self.is_infinity else f"ProjPoint({self.value})"

    def __str__(self):
        return "oo" if self.is_infinity else str(self.value)


def parse_point(text: str) -> ProjPoint:
    t = text.strip().replace(" ", "")
    if t in ("oo", "inf", "infinity"):
        return ProjPoint.infinity()
    try:
        if t.endswith("*i") or t.endswith("i"):
            body = t[:-2] if t.endswith("*i") else t[:-1]
            cut = max(body.rfind("+", 1), body.rfind("-", 1))
            if cut <= 0:
                return ProjPoint.of(0, parse_rat(body or "1") if body not in ("", "+", "-") else
                                    (-1 if body == "-" else 1))
            re, im = body[:cut], body[cut:]
            im = {"+": "1", "-": "-1"}.get(im, im)
            return ProjPoint.of(parse_rat(re), parse_rat(im))
        return ProjPoint.of(parse_rat(t))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot parse point {text!r}") from exc


def cross_ratio(z1: ProjPoint, z2: ProjPoint, z3: ProjPoint, z4: ProjPoint) -> ProjPoint:
    """(z1 - z3)(z2 - z4) / ((z1 - z4)(z2 - z3)), factors with infinity dropped."""
    pts = [z1, z2, z3, z4]
    for i in range(4):
        for j in range(i + 1, 4):
            if pts[i] == pts[j]:
                raise CoincidentPoints("cross-ratio needs four distinct points")
    num = [(0, 2), (1, 3)]
    den = [(0, 3), (1, 2)]
    inf = next((i for i, p in enumerate(pts) if p.is_infinity), None)
    if inf is not None:
        num = [f for f in num if inf not in f]
        den = [f for f in den if inf not in f]
    val = GaussRat(1)
    for i, j in num:
        val = val * (pts[i].value - pts[j].value)
    for i, j in den:
        val = val / (pts[i].value - pts[j].value)
    return ProjPoint(val)


def _check_distinct(p: Sequence[ProjPoint]):
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] == p[j]:
                raise CoincidentPoints("marked points must be pairwise distinct")


def psi_eval(p: Sequence[ProjPoint], j: int, k: int) -> ProjPoint:
    """p_jk = (p_j, q_j; q_k, p_k) for p = (p1, p2, p3, q1, q2, q3)."""
    if len(p) != 6:
        raise DomainError("six points expected")
    _check_distinct(p)
    if j == k or not (1 <= j <= 3 and 1 <= k <= 3):
        raise DomainError("need distinct indices in 1..3")
    return cross_ratio(p[j - 1], p[j + 2], p[k + 2], p[k - 1])


def psi_eval_nontrinodal(p: Sequence[ProjPoint]) -> tuple[ProjPoint, ProjPoint]:
    """(pbar13, pbar23) for p = (p1, q1, p3+, q3-, p2, q2, q3+, p3-)."""
    if len(p) != 8:
        raise DomainError("eight points expected")
    _check_distinct(p[:4])
    _check_distinct(p[4:])
    p1, q1, p3p, q3m, p2, q2, q3p, p3m = p
    return cross_ratio(p1, q1, q3m, p3p), cross_ratio(p2, q2, q3p, p3m)


def _lhs(eq: CrossRatioEq, p: Sequence[ProjPoint]) -> GaussRat:
    a1, a2, a3 = eq.exponents
    if eq.stratum == "trinodal":
        vals = [psi_eval(p, 2, 3), psi_eval(p, 1, 3), psi_eval(p, 1, 2)]
        exps = [a1, a2, a3]
    else:
        b13, b23 = psi_eval_nontrinodal(p)
        vals, exps = [b23, b13], [a1, a2]
    out = GaussRat(1)
    for v, a in zip(vals, exps):
        if v.is_infinity or not v.value:
            raise DomainError("cross-ratio is 0 or infinite")
        out = out * v.value ** a
    return out


_ROOTS = {Fraction(0): GaussRat(1), Fraction(1, 4): GaussRat(0, -1),
          Fraction(1, 2): GaussRat(-1), Fraction(3, 4): GaussRat(0, 1)}


def exact_phase_value(q) -> GaussRat:
    """exp(-2 pi i q) when it is a Gaussian rational."""
    q = phase_mod1(q)
    if q not in _ROOTS:
        raise PhaseNotRepresentable(f"exp(-2 pi i * {q}) is not a Gaussian rational")
    return _ROOTS[q]


def satisfies_sh(p: Sequence[ProjPoint], eqs: Sequence[CrossRatioEq], mode: str = "exact",
                 precision: int = 128) -> bool:
    if mode == "exact":
        return all(_lhs(e, p) == exact_phase_value(e.phase) for e in eqs)
    if mode != "numeric":
        raise DomainError(f"unknown mode {mode!r}")
    from mpmath import iv

    iv.prec = precision + 32
    bound = iv.mpf(2) ** (-(precision // 2))
    for e in eqs:
        lhs = _lhs(e, p)
        ang = 2 * iv.pi * iv.mpf(e.phase.numerator) / e.phase.denominator
        dre = iv.mpf(lhs.re.numerator) / lhs.re.denominator - iv.cos(ang)
        dim = iv.mpf(lhs.im.numerator) / lhs.im.denominator + iv.sin(ang)
        # interval squares can dip below zero, so compare each part separately
        if not (abs(dre).b < bound.a and abs(dim).b < bound.a):
            return False
    return True
