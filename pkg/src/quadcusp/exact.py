"""Exact arithmetic in Q, Q(sqrt D), F = Q(sqrt D) + Q and linear forms in z1, z2, z3.

Rationals are :class:`fractions.Fraction`.  Quadratic elements are stored in
the basis (1, sqrt D); elements of F are pairs (x, q).
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

from .errors import (
    DiscriminantMismatch,
    DivisionByZero,
    NegativeDiscriminantForRealEmbedding,
    NotADiscriminant,
    ParseError,
)

Rat = Fraction
Number = Union[int, Fraction]


def as_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def parse_rat(text: str) -> Fraction:
    s = text.strip().replace(" ", "")
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", s):
        raise ParseError(f"not a rational: {text!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError as exc:
        raise ParseError(f"zero denominator in {text!r}") from exc


def format_rat(r: Fraction) -> str:
    r = Fraction(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def is_discriminant(D: int) -> bool:
    return D != 0 and D % 4 in (0, 1) and not is_square(D)


def check_disc(D: int) -> int:
    if not isinstance(D, int) or not is_discriminant(D):
        raise NotADiscriminant(f"{D!r} is not a nonsquare discriminant")
    return D


_CHECKED: set[int] = set()


class QuadElem:
    """The element u + v*sqrt(D) of Q(sqrt D)."""

    __slots__ = ("D", "u", "v")

    def __init__(self, D: int, u: Number = 0, v: Number = 0):
        if D not in _CHECKED:
            check_disc(D)
            _CHECKED.add(D)
        self.D = D
        self.u = as_rat(u)
        self.v = as_rat(v)

    @classmethod
    def sqrt(cls, D: int) -> QuadElem:
        return cls(D, 0, 1)

    @classmethod
    def gamma(cls, D: int) -> QuadElem:
        """(D + sqrt D)/2, the standard generator of the order of discriminant D."""
        return cls(D, Fraction(D, 2), Fraction(1, 2))

    def _coerce(self, other) -> QuadElem:
        if isinstance(other, QuadElem):
            if other.D != self.D:
                raise DiscriminantMismatch(f"{self.D} != {other.D}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.D, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.D, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.D, -self.u, -self.v)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(self.D, self.u - o.u, self.v - o.v)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadElem(
            self.D,
            self.u * o.u + self.v * o.v * self.D,
            self.u * o.v + self.v * o.u,
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadElem:
        n = self.norm()
        if n == 0:
            raise DivisionByZero("inverse of zero")
        return QuadElem(self.D, self.u / n, -self.v / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = QuadElem(self.D, 1, 0)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return (self.D, self.u, self.v) == (other.D, other.u, other.v)
        if isinstance(other, (int, Fraction)):
            return self.v == 0 and self.u == other
        return NotImplemented

    def __hash__(self):
        if self.v == 0:
            return hash(self.u)
        return hash((self.D, self.u, self.v))

    def __bool__(self):
        return bool(self.u) or bool(self.v)

    def conj(self) -> QuadElem:
        return QuadElem(self.D, self.u, -self.v)

    def norm(self) -> Fraction:
        return self.u * self.u - self.v * self.v * self.D

    def trace(self) -> Fraction:
        return 2 * self.u

    def antiinv(self) -> Fraction:
        """The sqrt(D) coefficient."""
        return self.v

    def is_rational(self) -> bool:
        return self.v == 0

    def __repr__(self):
        return f"QuadElem({self.D}, {self.u!s}, {self.v!s})"

    def __str__(self):
        return format_quad(self)


def quad_conj(a: QuadElem) -> QuadElem:
    return a.conj()


def quad_norm(a: QuadElem) -> Fraction:
    return a.norm()


def quad_trace(a: QuadElem) -> Fraction:
    return a.trace()


def antiinv(a: QuadElem) -> Fraction:
    return a.antiinv()


def format_quad(a: QuadElem) -> str:
    root = f"sqrt({a.D})"
    if a.v == 0:
        return format_rat(a.u)
    if abs(a.v) == 1:
        vpart = root
    else:
        vpart = f"{format_rat(abs(a.v))}*{root}"
    if a.u == 0:
        return vpart if a.v > 0 else "-" + vpart
    sign = "+" if a.v > 0 else "-"
    return f"{format_rat(a.u)} {sign} {vpart}"


_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(\*)?(sqrt\((-?\d+)\)|g)?$")


def parse_quad(text: str, D: int) -> QuadElem:
    """Parse ``u + v*sqrt(D)``; the symbol ``g`` stands for (D+sqrt D)/2."""
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty quadratic element")
    pieces = re.findall(r"[+-]?[^+-]+", s.replace("(-", "(~"))
    if "".join(pieces) != s.replace("(-", "(~"):
        raise ParseError(f"cannot parse {text!r}")
    total = QuadElem(D)
    for piece in pieces:
        m = _TERM.match(piece.replace("(~", "(-"))
        if not m or (m.group(2) is None and m.group(4) is None):
            raise ParseError(f"bad term {piece!r} in {text!r}")
        sign, coeff, star, sym, rootD = m.groups()
        if star and (coeff is None or sym is None):
            raise ParseError(f"bad term {piece!r} in {text!r}")
        c = Fraction(coeff) if coeff is not None else Fraction(1)
        if sign == "-":
            c = -c
        if sym is None:
            total = total + c
        elif sym == "g":
            total = total + c * QuadElem.gamma(D)
        else:
            if int(rootD) != D:
                raise DiscriminantMismatch(f"sqrt({rootD}) used with D={D}")
            total = total + QuadElem(D, 0, c)
    return total


class PCElem:
    """An element (x, q) of the pseudo-cubic algebra Q(sqrt D) + Q."""

    __slots__ = ("x", "q")

    def __init__(self, x: QuadElem, q: Number = 0):
        self.x = x
        self.q = as_rat(q)

    @property
    def D(self) -> int:
        return self.x.D

    @classmethod
    def make(cls, D: int, u: Number = 0, v: Number = 0, q: Number = 0) -> PCElem:
        return cls(QuadElem(D, u, v), q)

    @classmethod
    def one(cls, D: int) -> PCElem:
        return cls(QuadElem(D, 1), 1)

    def _coerce(self, other):
        if isinstance(other, PCElem):
            if other.D != self.D:
                raise DiscriminantMismatch(f"{self.D} != {other.D}")
            return other
        if isinstance(other, (int, Fraction)):
            return PCElem(QuadElem(self.D, other), other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PCElem(self.x + o.x, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return PCElem(-self.x, -self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PCElem(self.x - o.x, self.q - o.q)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return PCElem(self.x * o.x, self.q * o.q)

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        return bool(self.x) and self.q != 0

    def inverse(self) -> PCElem:
        if not self.is_unit():
            raise DivisionByZero("zero divisor in F")
        return PCElem(self.x.inverse(), 1 / self.q)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def sigma(self) -> PCElem:
        return PCElem(self.x.conj(), self.q)

    def trp(self) -> Fraction:
        return self.x.trace() + self.q

    def coords(self) -> tuple[Fraction, Fraction, Fraction]:
        """Coordinates in the basis ((1,0), (sqrt D,0), (0,1))."""
        return (self.x.u, self.x.v, self.q)

    @classmethod
    def from_coords(cls, D: int, c: Iterable) -> PCElem:
        u, v, q = c
        return cls(QuadElem(D, u, v), q)

    def __eq__(self, other):
        if isinstance(other, PCElem):
            return self.x == other.x and self.q == other.q
        return NotImplemented

    def __hash__(self):
        return hash((self.x, self.q))

    def __bool__(self):
        return bool(self.x) or bool(self.q)

    def __repr__(self):
        return f"PCElem({self.x!r}, {self.q!s})"

    def __str__(self):
        return f"({format_quad(self.x)} ; {format_rat(self.q)})"


def trp(a: PCElem) -> Fraction:
    return a.trp()


def parse_pc(text: str, D: int) -> PCElem:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")) or s.count(";") != 1:
        raise ParseError(f"expected '(x ; q)', got {text!r}")
    left, right = s[1:-1].split(";")
    return PCElem(parse_quad(left, D), parse_rat(right))


class ZLinForm:
    """c0 + c1*z1 + c2*z2 + c3*z3 with quadratic coefficients."""

    __slots__ = ("D", "c")

    def __init__(self, D: int, c0=0, c1=0, c2=0, c3=0):
        self.D = D
        self.c = tuple(_lift(D, x) for x in (c0, c1, c2, c3))

    @classmethod
    def const(cls, value, D: int) -> ZLinForm:
        return cls(D, value)

    @classmethod
    def var(cls, i: int, D: int, coeff=1) -> ZLinForm:
        cs = [0, 0, 0, 0]
        cs[i] = coeff
        return cls(D, *cs)

    def __add__(self, other):
        o = self._coerce(other)
        return ZLinForm(self.D, *(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return ZLinForm(self.D, *(-a for a in self.c))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, scalar):
        if isinstance(scalar, ZLinForm):
            raise TypeError("product of two linear forms is not linear")
        s = _lift(self.D, scalar)
        return ZLinForm(self.D, *(a * s for a in self.c))

    __rmul__ = __mul__

    def _coerce(self, other) -> ZLinForm:
        if isinstance(other, ZLinForm):
            if other.D != self.D:
                raise DiscriminantMismatch(f"{self.D} != {other.D}")
            return other
        return ZLinForm(self.D, other)

    def variables(self) -> set[int]:
        return {i for i in (1, 2, 3) if self.c[i]}

    def mobius_clear(self, i: int, a, b, c, d) -> ZLinForm:
        """Rewrite (c*z+d) * (c0 + ci*w) with w = (a*z+b)/(c*z+d) as a linear form in z = z_i."""
        others = self.variables() - {i}
        if others:
            raise ValueError(f"form involves variables {others} besides z{i}")
        c0, ci = self.c[0], self.c[i]
        const = c0 * _lift(self.D, d) + ci * _lift(self.D, b)
        lin = c0 * _lift(self.D, c) + ci * _lift(self.D, a)
        return ZLinForm(self.D, const) + ZLinForm.var(i, self.D, lin)

    def __eq__(self, other):
        if isinstance(other, ZLinForm):
            return self.D == other.D and self.c == other.c
        return self == ZLinForm(self.D, other)

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"ZLinForm({self.D}, {', '.join(map(repr, self.c))})"

    def __str__(self):
        parts = []
        for i, coeff in enumerate(self.c):
            if not coeff:
                continue
            text = format_quad(coeff)
            if i == 0:
                parts.append(text)
            else:
                parts.append(f"({text})*z{i}")
        return " + ".join(parts) if parts else "0"


def _lift(D: int, x) -> QuadElem:
    if isinstance(x, QuadElem):
        if x.D != D:
            raise DiscriminantMismatch(f"{x.D} != {D}")
        return x
    return QuadElem(D, as_rat(x))


# ---------------------------------------------------------------------------
# certified real intervals


class RealInterval:
    """A closed interval [lo, hi] with rational endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = as_rat(lo)
        self.hi = self.lo if hi is None else as_rat(hi)
        if self.lo > self.hi:
            raise ValueError("empty interval")

    def _coerce(self, other):
        if isinstance(other, RealInterval):
            return other
        if isinstance(other, (int, Fraction)):
            return RealInterval(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RealInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return RealInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        ends = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return RealInterval(min(ends), max(ends))

    __rmul__ = __mul__

    def abs(self) -> RealInterval:
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RealInterval(0, max(-self.lo, self.hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= as_rat(x) <= self.hi

    def certainly_gt(self, x) -> bool:
        return self.lo > as_rat(x)

    def certainly_lt(self, x) -> bool:
        return self.hi < as_rat(x)

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def __repr__(self):
        return f"RealInterval({format_rat(self.lo)}, {format_rat(self.hi)})"


def _floor_dyadic(x: Fraction, k: int) -> Fraction:
    return Fraction(math.floor(x * 2**k), 2**k)


def _ceil_dyadic(x: Fraction, k: int) -> Fraction:
    return Fraction(math.ceil(x * 2**k), 2**k)


def sqrt_interval(n: int, bits: int) -> RealInterval:
    """Dyadic interval of width 2**-bits containing sqrt(n)."""
    if n < 0:
        raise NegativeDiscriminantForRealEmbedding(f"sqrt of {n}")
    s = math.isqrt(n << (2 * bits))
    if s * s == n << (2 * bits):
        return RealInterval(Fraction(s, 2**bits))
    return RealInterval(Fraction(s, 2**bits), Fraction(s + 1, 2**bits))


def embed_quad(x: QuadElem, sign: int, precision_bits: int) -> RealInterval:
    if x.v == 0:
        return RealInterval(x.u)
    if x.D < 0:
        raise NegativeDiscriminantForRealEmbedding(f"D = {x.D} < 0")
    scale = abs(x.v)
    extra = max(scale.numerator.bit_length() - scale.denominator.bit_length() + 1, 0)
    mag = abs(x.u) + scale * (math.isqrt(x.D) + 1)
    rel = max(mag.numerator.bit_length() - mag.denominator.bit_length() + 1, 0)
    k = precision_bits + extra + 2
    root = sqrt_interval(x.D, k)
    val = RealInterval(x.u) + (sign * x.v) * root
    out = precision_bits + 2 + rel
    return RealInterval(_floor_dyadic(val.lo, out), _ceil_dyadic(val.hi, out))


def embed_real(a, which: int, precision_bits: int = 64) -> RealInterval:
    """Real pseudo-embedding number ``which`` (1, 2 or 3) of ``a``.

    Embeddings 1 and 2 send sqrt(D) to +sqrt(D) and -sqrt(D); embedding 3
    is the rational coordinate.
    """
    if isinstance(a, QuadElem):
        a = PCElem(a, 0)
    if which == 3:
        return RealInterval(a.q)
    if which not in (1, 2):
        raise ValueError("which must be 1, 2 or 3")
    if a.D < 0:
        raise NegativeDiscriminantForRealEmbedding(f"D = {a.D} < 0")
    return embed_quad(a.x, 1 if which == 1 else -1, precision_bits)
