"""Named property suites, one per acceptance criterion.

Each suite returns a :class:`SuiteResult`; ``quadcusp verify --suite NAME``
runs one from the command line and the acceptance tests run all of them.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import lattices as lat
from . import modvariety as mv
from . import oracles
from .boundary import Weighting, admissibility, dual_basis, exponent_lattice, is_admissible
from .exact import PCElem, QuadElem, is_square
from .orders import (
    QIdeal,
    QOrder,
    conductor,
    factorize,
    ideal_conj,
    ideal_mul,
    ideal_pow,
    is_invertible,
    legendre,
    pairing_type,
    prime_splitting,
    primitive_ideals_of_norm,
    satisfies_pfc,
    scalar_ideal,
    smart_basis,
    verify_smart_basis,
)
from .errors import DomainError, NotAnIdeal
from . import prym
from . import pseudocubic as pc


@dataclass
class SuiteResult:
    name: str
    ok: bool
    cases: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    seconds: float = 0.0

    def fail(self, msg):
        self.ok = False
        if len(self.failures) < 20:
            self.failures.append(msg)

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"{status} {self.name} ({self.cases} cases, {self.seconds:.1f}s){extra}"


CRITERION5_PAIRS = [(5, 11), (8, 7), (13, 3)]
CRITERION2_DISCS = [5, 8, 12, 13, 17, 21, 24, 28, 29, 33]


def discriminants(bound: int) -> list[int]:
    return [D for D in range(-bound, bound + 1)
            if D != 0 and D % 4 in (0, 1) and not (D > 0 and is_square(D))]


def ideals_up_to_norm(D: int, bound: int) -> list[QIdeal]:
    out = []
    for b in range(1, bound + 1):
        for n in range(b, bound // b + 1, b):
            for a in range(0, n, b):
                try:
                    out.append(QIdeal(D, n, a, b))
                except NotAnIdeal:
                    pass
    return out


# ---------------------------------------------------------------------------


def ideal_algebra(seed: int = 0) -> SuiteResult:
    """a * a^sigma = N(a) O_D for invertible ideals; the D = -12 counterexample."""
    res = SuiteResult("ideal-algebra", True)
    for D in discriminants(200):
        for I in ideals_up_to_norm(D, 30):
            if not is_invertible(I):
                continue
            res.cases += 1
            if ideal_mul(I, ideal_conj(I)) != scalar_ideal(D, I.norm()):
                res.fail(f"D={D} {I}")
    bad = QIdeal(-12, 2, 1, 1)  # <2, 1 + sqrt(-3)>
    res.cases += 1
    if not (bad.contains(QuadElem(-12, 1, Fraction(1, 2))) and not is_invertible(bad)):
        res.fail("<2, 1+sqrt(-3)> should be non-invertible in O_-12")
    if ideal_mul(bad, ideal_conj(bad)) == scalar_ideal(-12, bad.norm()):
        res.fail("<2, 1+sqrt(-3)> unexpectedly satisfies a a^s = N(a) O")
    return res


def _split_count(D: int, d: int) -> int:
    s = 0
    for p in factorize(d):
        if p == 2:
            split = D % 8 == 1
        else:
            split = legendre(D, p) == 1
        s += split
    return s


def pfc_count(seed: int = 0) -> SuiteResult:
    res = SuiteResult("pfc-count", True)
    for D in CRITERION2_DISCS:
        f = conductor(D)
        for d in range(1, 31):
            if math.gcd(d, f) != 1:
                continue
            res.cases += 1
            ideals = primitive_ideals_of_norm(d, D)
            brute = oracles.ideals_of_norm_brute(D, d)
            pfc = satisfies_pfc(d, D)
            if pfc != bool(ideals):
                res.fail(f"D={D} d={d}: pfc={pfc} but {len(ideals)} ideals")
            if len(ideals) != len(brute):
                res.fail(f"D={D} d={d}: {len(ideals)} ideals, brute force {len(brute)}")
            if pfc and len(ideals) != 2 ** _split_count(D, d):
                res.fail(f"D={D} d={d}: {len(ideals)} != 2^s")
    return res


def pairing_types(seed: int = 0) -> SuiteResult:
    res = SuiteResult("pairing-types", True)
    for D in CRITERION2_DISCS:
        O = QOrder(D)
        for d1 in range(1, 41):
            for d2 in range(d1, 41 // d1 + 1, d1):
                if d1 * d2 > 40:
                    continue
                m = d2 // d1
                if math.gcd(m, O.f) != 1 or not satisfies_pfc(m, O):
                    continue
                a = scalar_ideal(D, d1)
                for p, k in factorize(m).items():
                    a = ideal_mul(a, ideal_pow(prime_splitting(p, O).prime_ideal, k))
                res.cases += 1
                t = pairing_type(a, O, side="O+a")
                if t != (d1, d2):
                    res.fail(f"D={D} ({d1},{d2}): got {t} for {a}")
    return res


def smart_bases(seed: int = 0) -> SuiteResult:
    res = SuiteResult("smart-bases", True)
    for D in CRITERION2_DISCS:
        f = conductor(D)
        for d in range(1, 31):
            if math.gcd(d, f) != 1 or not satisfies_pfc(d, D):
                continue
            for I in primitive_ideals_of_norm(d, D):
                res.cases += 1
                e1, e2 = smart_basis(I)
                checks = verify_smart_basis(I, e1, e2)
                if not all(checks.values()):
                    res.fail(f"D={D} {I}: {checks}")
    return res


def _smart_data(D, d):
    return [mv.SmartData.from_ideal(I) for I in primitive_ideals_of_norm(d, D)]


def group_cocycle(seed: int = 0, samples: int = 100) -> SuiteResult:
    res = SuiteResult("group-cocycle", True)
    rng = random.Random(seed)
    for D, d in CRITERION5_PAIRS:
        sd = _smart_data(D, d)[0]
        for _ in range(samples):
            g = mv.random_lb_element(sd, rng)
            h = mv.random_lb_element(sd, rng)
            res.cases += 1
            if not (mv.in_gamma_lb(g, sd) and mv.in_gamma(g, sd)):
                res.fail(f"({D},{d}) element not in Gamma")
                continue
            M = mv.M_of(g, sd)
            if not mv.is_integral(M):
                res.fail(f"({D},{d}) M(A,B) not integral")
            if not mv.cocycle_holds(g, h, sd):
                res.fail(f"({D},{d}) cocycle fails")
            if not mv.verify_period_identity(g, sd, M):
                res.fail(f"({D},{d}) period identity fails")
        w = mv.ub_not_gamma_witness(sd)
        res.cases += 1
        if not (mv.in_gamma_ub(w, sd) and not mv.in_gamma(w, sd) and not mv.is_integral(mv.M_of(w, sd))):
            res.fail(f"({D},{d}) upper-bound witness does not give a non-integral M")
    return res


def phi_suite(seed: int = 0, samples: int = 100) -> SuiteResult:
    res = SuiteResult("phi", True)
    rng = random.Random(seed)
    for D, d in CRITERION5_PAIRS:
        sd = _smart_data(D, d)[0]
        ident = mv.Mat2(1 % d, 0, 0, 1 % d)
        for _ in range(samples):
            A, B = mv.random_module_element(sd, rng), mv.random_module_element(sd, rng)
            res.cases += 1
            lhs = mv.phi_reduction(A * B, sd)
            rhs = mv.mat_mod_mul(mv.phi_reduction(A, sd), mv.phi_reduction(B, sd), d)
            if lhs != rhs:
                res.fail(f"({D},{d}) phi not multiplicative")
        # kernel side: generator words and conjugated-down elements
        for _ in range(samples):
            A = mv.random_lb_element(sd, rng).A
            res.cases += 1
            if not (mv.in_gamma_lb_tilde(A, sd) and mv.phi_reduction(A, sd) == ident):
                res.fail(f"({D},{d}) lower-bound element with phi != 1")
            X = mv.random_module_element(sd, rng)
            m = mv.phi_reduction(X, sd)
            K = X * mv.phi_section(m.adjugate().mod(d), sd)
            if mv.phi_reduction(K, sd) != ident or not mv.in_gamma_lb_tilde(K, sd):
                res.fail(f"({D},{d}) corrected element not in kernel")
        # non-kernel side
        seen = 0
        tries = 0
        while seen < samples and tries < 50 * samples:
            tries += 1
            X = mv.random_module_element(sd, rng)
            if mv.phi_reduction(X, sd) == ident:
                continue
            seen += 1
            res.cases += 1
            if mv.in_gamma_lb_tilde(X, sd):
                res.fail(f"({D},{d}) element with phi != 1 lies in the kernel group")
        if seen < samples and d > 1:
            res.fail(f"({D},{d}) only {seen} non-kernel samples found")
    for d in range(1, 13):
        res.cases += 1
        if mv.sl2_zd_order(d) != oracles.sl2_brute(d):
            res.fail(f"|SL2(Z/{d})| mismatch")
    return res


def _random_weight(rng, D, h):
    while True:
        w = PCElem.make(D, rng.randint(-h, h), rng.randint(-h, h), rng.randint(-h, h))
        if w:
            return w


def admissibility_oracle(seed: int = 0, samples: int = 500) -> SuiteResult:
    res = SuiteResult("admissibility", True)
    rng = random.Random(seed)
    for D in (5, 8, 13, 17):
        for _ in range(samples):
            W = Weighting.trinodal(*(_random_weight(rng, D, 8) for _ in range(3)))
            r = admissibility(W.weights())
            res.cases += 1
            if not r.check_certificate():
                res.fail(f"D={D} {W.r}: certificate does not verify")
            if r.admissible != oracles.fm_admissible(r.images):
                res.fail(f"D={D} {[str(x) for x in W.r]}: disagrees with Fourier-Motzkin")
    return res


def ranktwo_examples(D: int = 5):
    F = Fraction
    ex1 = (PCElem.make(D, 1), PCElem.make(D, 0, 1), PCElem.make(D, 0, 0, 1))
    ex2 = (PCElem.make(D, 1, 0, F(D, 2)), PCElem.make(D, 1, 0, -F(D, 2)), PCElem.make(D, 0, 1))
    return ex1, ex2


def ranktwo(seed: int = 0) -> SuiteResult:
    res = SuiteResult("ranktwo", True)
    expected = (1, 2)
    for D in (5, 8, 13, 17):
        for i, r in enumerate(ranktwo_examples(D)):
            res.cases += 1
            adm = is_admissible(Weighting.trinodal(*r))
            rank = len(exponent_lattice(*dual_basis(*r)))
            res.notes.append(f"D={D} example {i + 1}: admissible={adm}, rank={rank}")
            if not adm:
                res.fail(f"D={D} example {i + 1} not admissible")
            if rank != expected[i]:
                res.fail(f"D={D} example {i + 1}: exponent lattice rank {rank}, expected {expected[i]}")
    return res


def _hyperbolic_rule(n: int, k: int, l: int) -> bool:
    kl = k * l
    return kl < 0 or kl >= 2 or (kl == 1 and n >= 2)


def prym_suite(seed: int = 0) -> SuiteResult:
    res = SuiteResult("prym", True)
    for n in range(1, 21):
        if is_square(2 * n + 1):
            continue
        for sign in "+-":
            res.cases += 1
            rep = prym.prym_pipeline(n, sign)
            if not rep.ok:
                res.fail(f"n={n} {sign}: {rep.failed()}")
        for k in range(-3, 4):
            for l in range(-3, 4):
                res.cases += 1
                if prym.is_hyperbolic(n, k, l, 128) != _hyperbolic_rule(n, k, l):
                    res.fail(f"n={n} k={k} l={l}: hyperbolicity")
    for n in range(1, 51):
        res.cases += 1
        if not prym.char_poly_check(n):
            res.fail(f"char poly n={n}")
        if not is_square(2 * n + 1) and not prym.eigen_checks(n, 128):
            res.fail(f"eigenvector n={n}")
    return res


def random_unimodular(rng, n: int, steps: int = 12, height: int = 2):
    U = lat.identity(n)
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        k = rng.randint(-height, height)
        U[i] = [x + k * y for x, y in zip(U[i], U[j])]
    if rng.random() < 0.5:
        U[0] = [-x for x in U[0]]
    return U


def random_divisor_chain(rng, n: int, bound: int = 4) -> list[int]:
    out = [rng.randint(1, bound)]
    for _ in range(n - 1):
        out.append(out[-1] * rng.randint(1, 2 if n > 4 else 3))
    return out


def random_alternating(rng, n: int, height: int = 20):
    while True:
        G = lat.zeros(n, n)
        for i in range(n):
            for j in range(i + 1, n):
                x = rng.randint(-height, height)
                G[i][j], G[j][i] = x, -x
        if lat.det(G) != 0:
            return G


def rational_reps_instance(rng, n: int):
    d = random_divisor_chain(rng, n, 3)
    P = random_unimodular(rng, n)
    Q = random_unimodular(rng, n)
    B = lat.matmul(Q, [[d[i] * x for x in P[i]] for i in range(n)])
    classes = []
    for i in range(n):
        shift = lat.vecmat([rng.randint(-2, 2) for _ in range(n)], B)
        classes.append([x + y for x, y in zip(P[i], shift)])
    return B, classes, d


def lattice_laws(seed: int = 0) -> SuiteResult:
    res = SuiteResult("lattice-laws", True)
    rng = random.Random(seed)
    for _ in range(200):
        n = rng.choice((4, 6))
        g = n // 2
        delta = random_divisor_chain(rng, g, 3)
        U = random_unimodular(rng, n)
        G = lat.matmul(lat.matmul(U, lat.standard_form(delta)), lat.transpose(U))
        while True:
            S = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
            if lat.det(S) != 0:
                break
        res.cases += 1
        index, degG, degS = lat.sublattice_degree_check(S, G)
        if degS != index * degG or degG != math.prod(delta):
            res.fail(f"degree law: index {index}, deg {degG}, sub {degS}")
    for _ in range(100):
        n = rng.choice((4, 6))
        G = random_alternating(rng, n)
        res.cases += 1
        V, delta = lat.symplectic_basis(G)
        if abs(lat.det(V)) != 1:
            res.fail("symplectic basis change is not unimodular")
        if lat.matmul(lat.matmul(V, G), lat.transpose(V)) != lat.standard_form(delta):
            res.fail(f"reduction of {G} is not standard")
        if tuple(delta) != lat.symplectic_type(G):
            res.fail("type disagrees with Smith invariants")
    for _ in range(100):
        n = rng.choice((2, 3, 4))
        B, classes, d = rational_reps_instance(rng, n)
        res.cases += 1
        mu, reps, a = lat.rational_basis_reps(B, classes, d)
        L = lat.QLattice(B)
        ok = lat.QLattice(mu) == L
        for i in range(n):
            ok &= [d[i] * x for x in reps[i]] == [a[i] * x for x in mu[i]]
            ok &= math.gcd(a[i], d[i]) == 1 and 1 <= a[i] <= d[i]
            ok &= L.contains([x - y for x, y in zip(reps[i], classes[i])])
        if not ok:
            res.fail(f"rational_basis_reps postconditions on {B}, {classes}, {d}")
    return res


def random_flattice(rng, D, bound=10):
    while True:
        g = [[rng.randint(-bound, bound) for _ in range(3)] for _ in range(3)]
        if lat.det(g) != 0:
            return pc.FLattice(D, g)


def random_hmap(rng, D):
    T = lat.zeros(3, 3)
    for i in range(3):
        for j in range(i, 3):
            T[i][j] = T[j][i] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    return pc.HMap.from_tensor(D, T)


def random_unit(rng, D, h=5):
    while True:
        a = PCElem.make(D, Fraction(rng.randint(-h, h), rng.randint(1, 3)), rng.randint(-h, h),
                        Fraction(rng.randint(-h, h), rng.randint(1, 3)))
        if a.is_unit():
            return a


def random_symmetric_int(rng, h=3):
    b = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            b[i][j] = b[j][i] = rng.randint(-h, h)
    return b


def pseudocubic_layer(seed: int = 0, samples: int = 100) -> SuiteResult:
    res = SuiteResult("pseudocubic", True)
    rng = random.Random(seed)
    Ds = (5, 8, 12, 13)
    for k in range(samples):
        D = Ds[k % len(Ds)]
        I = random_flattice(rng, D)
        res.cases += 1
        if pc.dual_lattice(pc.dual_lattice(I)) != I:
            res.fail(f"double dual of {I}")
    for k in range(samples):
        D = Ds[k % len(Ds)]
        I, h, a = random_flattice(rng, D), random_hmap(rng, D), random_unit(rng, D)
        res.cases += 1
        if pc.o_h(I, h) != pc.o_h(I.scale(a), h.twist(a)):
            res.fail(f"equivariance for {I}, a={a}")
    for k in range(samples):
        D = Ds[k % len(Ds)]
        I = random_flattice(rng, D)
        h1, h2 = random_hmap(rng, D), random_hmap(rng, D)
        x = PCElem.make(D, rng.randint(-4, 4), rng.randint(-4, 4), rng.randint(-4, 4))
        f = pc.integral_self_adjoint(I, random_symmetric_int(rng))
        g = pc.integral_self_adjoint(I, random_symmetric_int(rng))
        h3 = h1 + f + pc.HMap.mult(x)  # same class as h1
        eq = lambda p, q: pc.extension_class_equal(p, q, I)  # noqa: E731
        res.cases += 1
        if not pc.maps_dual_into(f, I):
            res.fail("constructed shift does not map the dual into I")
        if not (eq(h1, h1) and eq(h1, h3) and eq(h3, h1)):
            res.fail("reflexivity/symmetry or shift detection failed")
        if eq(h1, h2) != eq(h2, h1):
            res.fail("asymmetric class comparison")
        if eq(h1, h2) and not eq(h3, h2):
            res.fail("transitivity failed")
        if not eq(pc.baer_sum(h1, h2), pc.baer_sum(h3, h2 + g)):
            res.fail("Baer sum not compatible with classes")
    for D, d in CRITERION5_PAIRS:
        for I in primitive_ideals_of_norm(d, D):
            e1, e2 = smart_basis(I)
            res.cases += 1
            M = pc.standard_symplectic_module(D, d, e1, e2)
            if M.gram() != lat.standard_form((1, 1, 1)):
                res.fail(f"({D},{d}) {I}: Gram is not standard")
    return res


SUITES: dict[str, tuple[int, Callable[..., SuiteResult]]] = {
    "ideal-algebra": (1, ideal_algebra),
    "pfc-count": (2, pfc_count),
    "pairing-types": (3, pairing_types),
    "smart-bases": (4, smart_bases),
    "group-cocycle": (5, group_cocycle),
    "phi": (6, phi_suite),
    "admissibility": (7, admissibility_oracle),
    "ranktwo": (8, ranktwo),
    "prym": (9, prym_suite),
    "lattice-laws": (10, lattice_laws),
    "pseudocubic": (11, pseudocubic_layer),
}


def run_suite(name: str, seed: int = 0) -> SuiteResult:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    try:
        res = SUITES[name][1](seed=seed)
    except Exception as exc:  # a crash is a failed suite, not a pass
        res = SuiteResult(name, False, failures=[f"{type(exc).__name__}: {exc}"])
    res.seconds = time.perf_counter() - t0
    return res
