"""Command line front end.

Exit codes: 0 success or true verdict, 1 false verdict or failed check,
2 usage error, 3 domain error.
"""
from __future__ import annotations

import argparse
import json
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import boundary as bd
from . import modvariety as mv
from . import orders as od
from . import prym as pr
from .errors import DomainError, ParseError
from .exact import format_quad, format_rat, parse_pc, parse_quad, parse_rat

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# argument grammar helpers


def split_top(text: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside of parentheses and brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError(f"unbalanced brackets in {text!r}")
    out.append("".join(cur).strip())
    return [p for p in out if p]


def parse_weights(text: str, D: int):
    return [parse_pc(w, D) for w in split_top(text)]


def parse_mat2(text: str, conv) -> mv.Mat2:
    parts = split_top(text.replace("[", "").replace("]", ""))
    if len(parts) != 4:
        raise ParseError(f"a 2x2 matrix needs four entries, got {text!r}")
    return mv.Mat2(*(conv(p) for p in parts))


def parse_pair(text: str, D: int) -> mv.GammaElem:
    """``a,b,c,d;e,f,g,h``: A over Q(sqrt D), B over Z, both row by row."""
    halves = text.split(";")
    if len(halves) != 2:
        raise ParseError(f"expected 'A;B', got {text!r}")

    def as_int(s):
        r = parse_rat(s)
        if r.denominator != 1:
            raise ParseError(f"B must be integral, got {s!r}")
        return int(r)

    A = parse_mat2(halves[0], lambda s: parse_quad(s, D))
    B = parse_mat2(halves[1], as_int)
    return mv.GammaElem(A, B)


def parse_sym(text: str):
    rows = [split_top(r) for r in text.split(";")]
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise ParseError("the h-matrix needs three rows of three entries separated by ';'")
    return [[parse_rat(x) for x in r] for r in rows]


def rat(x) -> str:
    return format_rat(Fraction(x))


def vec(v) -> list[str]:
    return [rat(x) for x in v]


def mat(M) -> list[list[str]]:
    return [vec(r) for r in M]


def ideal_json(I: od.QIdeal) -> dict:
    return {"ideal": str(I), "n": I.n, "a": I.a, "b": I.b, "norm": I.norm(),
            "primitive": od.is_primitive(I), "invertible": od.is_invertible(I)}


def frac_json(J: od.FracIdeal) -> list[str]:
    return [format_quad(x) for x in J.basis()]


def _smart_data(D: int, d: int, ideal: str | None) -> mv.SmartData:
    if ideal:
        I = od.parse_ideal(ideal, D)
        if I.norm() != d:
            raise DomainError(f"{I} has norm {I.norm()}, not {d}")
    else:
        ideals = od.primitive_ideals_of_norm(d, D)
        if not ideals:
            raise DomainError(f"({D}, {d}) violates the prime factor condition")
        I = ideals[0]
    return mv.SmartData.from_ideal(I)


# ---------------------------------------------------------------------------
# subcommands; each returns (ok, payload, text)


def cmd_ideal(a):
    D = a.D
    if a.norm is not None:
        found = []
        for b in range(1, a.norm + 1):
            if a.norm % b:
                continue
            n = a.norm // b
            if n % b:
                continue
            for x in range(0, n, b):
                try:
                    found.append(od.QIdeal(D, n, x, b))
                except DomainError:
                    pass
        payload = {"D": D, "norm": a.norm, "ideals": [ideal_json(I) for I in found]}
        text = "\n".join(f"{I}  invertible={od.is_invertible(I)} primitive={od.is_primitive(I)}"
                         for I in found) or f"no ideals of norm {a.norm}"
        return True, payload, text
    if not a.gens:
        raise UsageError("ideal needs --norm or --gens")
    ideals = [od.parse_ideal(g, D) for g in a.gens]
    if a.mul:
        I = ideals[0]
        for J in ideals[1:]:
            I = od.ideal_mul(I, J)
    else:
        if len(ideals) != 1:
            raise UsageError("several --gens need --mul")
        I = ideals[0]
    payload = {"D": D, **ideal_json(I), "conjugate": str(od.ideal_conj(I))}
    lines = [f"{I}  norm={I.norm()} primitive={od.is_primitive(I)} invertible={od.is_invertible(I)}",
             f"conjugate {payload['conjugate']}"]
    ok = True
    if a.invert:
        inv = od.ideal_inverse(I)
        check = inv * I == od.FracIdeal.from_ideal(od.QIdeal.unit(D))
        payload["inverse"] = frac_json(inv)
        payload["inverse_check"] = check
        lines.append(f"inverse Z-basis {', '.join(payload['inverse'])} (a * a^-1 = O: {check})")
        ok = check
    return ok, payload, "\n".join(lines)


def cmd_classify(a):
    D, d = a.D, a.d
    O = od.QOrder(D)
    if d < 1:
        raise DomainError("d must be positive")
    pfc = od.satisfies_pfc(d, O)
    ideals = od.primitive_ideals_of_norm(d, O)
    rows = []
    for I in ideals:
        e1, e2 = od.smart_basis(I)
        checks = od.verify_smart_basis(I, e1, e2)
        rows.append({**ideal_json(I), "eta1": format_quad(e1), "eta2": format_quad(e2),
                     "smart_checks": checks, "type": list(od.pairing_type(I))})
    payload = {"D": D, "d": d, "conductor": O.f, "pfc": pfc, "components": len(ideals),
               "split_primes": od.split_prime_count(d, O), "ideals": rows}
    lines = [f"D={D} d={d}: prime factor condition {'holds' if pfc else 'fails'}, "
             f"{len(ideals)} component(s)"]
    for r in rows:
        lines.append(f"  {r['ideal']}  smart basis eta1={r['eta1']}, eta2={r['eta2']}  type {tuple(r['type'])}")
    ok = pfc and all(all(r["smart_checks"].values()) for r in rows)
    return ok, payload, "\n".join(lines)


def cmd_group(a):
    sd = _smart_data(a.D, a.d, a.ideal)
    g = parse_pair(a.check, a.D)
    res = {"gamma_lb": mv.in_gamma_lb(g, sd), "gamma": mv.in_gamma(g, sd), "gamma_ub": mv.in_gamma_ub(g, sd)}
    payload = {"D": a.D, "d": a.d, "ideal": str(sd.ideal), **res}
    if mv.in_sl2_module(g.A, sd):
        phi = mv.phi_reduction(g.A, sd)
        payload["phi"] = [[phi.a, phi.b], [phi.c, phi.d]]
    lines = [f"{k}: {v}" for k, v in res.items()]
    if "phi" in payload:
        lines.append(f"phi(A) = {payload['phi']} mod {a.d}")
    return res["gamma"], payload, "\n".join(lines)


def cmd_cocycle(a):
    sd = _smart_data(a.D, a.d, a.ideal)
    pairs = [parse_pair(p, a.D) for p in a.pair]
    g = pairs[0]
    M = mv.M_of(g, sd)
    integral = mv.is_integral(M)
    payload = {"D": a.D, "d": a.d, "ideal": str(sd.ideal), "M": mat(M), "integral": integral}
    lines = ["M(A,B) ="] + ["  " + " ".join(f"{x:>6}" for x in r) for r in payload["M"]]
    lines.append(f"integral: {integral}")
    ok = integral
    if len(pairs) > 1:
        coc = all(mv.cocycle_holds(g, h, sd) for h in pairs[1:])
        payload["cocycle"] = coc
        lines.append(f"cocycle: {coc}")
        ok = ok and coc
    if a.verify_period:
        per = mv.verify_period_identity(g, sd, M, require_member=False)
        payload["period_identity"] = per
        lines.append(f"period identity: {per}")
        ok = ok and per
    return ok, payload, "\n".join(lines)


def _weights(a):
    ws = parse_weights(a.weights, a.D)
    if a.D <= 0:
        raise DomainError("admissibility needs a positive discriminant")
    return ws


def cmd_admissible(a):
    ws = _weights(a)
    res = bd.admissibility([s * w for w in ws for s in (1, -1)])
    payload = {
        "D": a.D,
        "weights": [str(w) for w in ws],
        "images": [vec(q) for q in res.images],
        "admissible": res.admissible,
        "interior_combination": vec(res.interior_combination) if res.interior_combination else None,
        "separating_functional": vec(res.separating_functional) if res.separating_functional else None,
        "certificate_ok": res.check_certificate(),
    }
    lines = [f"Q({w}) = ({', '.join(q)})" for w, q in zip(payload["weights"], payload["images"][::2])]
    lines.append(f"admissible: {res.admissible}")
    if res.admissible:
        lines.append(f"interior combination (over +-w): {', '.join(payload['interior_combination'])}")
    else:
        lines.append(f"separating functional: ({', '.join(payload['separating_functional'])})")
    return res.admissible, payload, "\n".join(lines)


def cmd_crossratio(a):
    ws = _weights(a)
    if len(ws) != 3:
        raise DomainError("three weights expected")
    b = parse_sym(a.h) if a.h else [[0] * 3 for _ in range(3)]
    if a.stratum == "trinodal":
        W = bd.Weighting.trinodal(*ws)
        eqs = bd.cross_ratio_equations(W, b)
    else:
        W = bd.Weighting.nontrinodal((ws[0], ws[2]), (ws[1], ws[2]))
        eqs = bd.nontrinodal_equations(W, b)
    payload = {"D": a.D, "stratum": a.stratum, "equations": [e.to_json() for e in eqs],
               "display": [str(e) for e in eqs], "symbolic": [e.pretty() for e in eqs]}
    lines = [f"{e}    [{e.pretty()}]" for e in eqs] or ["no equations"]
    ok = True
    if a.point:
        pts = [bd.parse_point(p) for p in split_top(a.point)]
        mode = a.mode
        if mode == "auto":
            try:
                for e in eqs:
                    bd.exact_phase_value(e.phase)
                mode = "exact"
            except DomainError:
                mode = "numeric"
        ok = bd.satisfies_sh(pts, eqs, mode=mode)
        payload.update({"point": [str(p) for p in pts], "mode": mode, "satisfied": ok})
        lines.append(f"point satisfies equations ({mode}): {ok}")
    return ok, payload, "\n".join(lines)


def cmd_prym(a):
    rep = pr.prym_pipeline(a.n, a.sign)
    return rep.ok, rep.to_json(), rep.text()


def cmd_verify(a):
    from .suites import SUITES, run_suite

    names = list(SUITES) if a.suite == "all" else [a.suite]
    if names[0] not in SUITES:
        raise UsageError(f"unknown suite {a.suite!r}; choose from all, {', '.join(SUITES)}")
    results = [run_suite(n, seed=a.seed) for n in names]
    payload = {"seed": a.seed, "suites": [
        {"name": r.name, "ok": r.ok, "cases": r.cases, "failures": r.failures, "notes": r.notes,
         "seconds": round(r.seconds, 3)} for r in results]}
    return all(r.ok for r in results), payload, "\n".join(r.summary() for r in results)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    p = _Parser(prog="quadcusp", description="Exact computations for quadratic orders, "
                "abelian threefolds with pseudo-real multiplication and their boundary strata.",
                parents=[common])
    p.add_argument("--input", help="batch file, one subcommand line per task")
    p.add_argument("--jobs", type=int, default=4, help="worker threads for --input")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("ideal", parents=[common], help="ideal arithmetic and enumeration")
    s.add_argument("--D", type=int, required=True)
    s.add_argument("--norm", type=int)
    s.add_argument("--gens", action="append", help="'<x, y>'; repeat with --mul")
    s.add_argument("--invert", action="store_true")
    s.add_argument("--mul", action="store_true")
    s.set_defaults(func=cmd_ideal)

    s = sub.add_parser("classify", parents=[common], help="components of type (1,d)")
    s.add_argument("--D", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(func=cmd_classify)

    for name, func, helptext in (("group", cmd_group, "membership in the modular groups"),
                                 ("cocycle", cmd_cocycle, "the 6x6 cocycle matrix")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--D", type=int, required=True)
        s.add_argument("--d", type=int, required=True)
        s.add_argument("--ideal", help="primitive ideal of norm d (default: first enumerated)")
        if name == "group":
            s.add_argument("--check", required=True, help="'a,b,c,d;e,f,g,h'")
        else:
            s.add_argument("--pair", action="append", required=True,
                           help="'a,b,c,d;e,f,g,h'; a second pair enables the cocycle check")
            s.add_argument("--verify-period", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("admissible", parents=[common], help="admissibility of a weighting")
    s.add_argument("--D", type=int, required=True)
    s.add_argument("--weights", required=True, help="'(x;q),(x;q),...'")
    s.set_defaults(func=cmd_admissible)

    s = sub.add_parser("crossratio", parents=[common], help="cross-ratio equations")
    s.add_argument("--D", type=int, required=True)
    s.add_argument("--weights", required=True)
    s.add_argument("--h", help="symmetric 3x3 matrix, rows separated by ';'")
    s.add_argument("--stratum", choices=("trinodal", "nontrinodal"), default="trinodal")
    s.add_argument("--point", help="six (or eight) points of P^1, e.g. '0,oo,1,2,3,1+i'")
    s.add_argument("--mode", choices=("auto", "exact", "numeric"), default="auto")
    s.set_defaults(func=cmd_crossratio)

    s = sub.add_parser("prym", parents=[common], help="the T_n family pipeline")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--sign", choices=("+", "-"), default="+")
    s.set_defaults(func=cmd_prym)

    s = sub.add_parser("verify", parents=[common], help="run a property suite")
    s.add_argument("--suite", required=True, help="suite name or 'all'")
    s.set_defaults(func=cmd_verify)
    return p


def execute(argv: list[str]) -> tuple[int, str]:
    """Run one task; returns (exit code, rendered output)."""
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if a.input:
            raise UsageError("--input cannot be nested")
        if not a.command:
            raise UsageError("a subcommand is required")
        ok, payload, text = a.func(a)
    except UsageError as exc:
        return EXIT_USAGE, f"usage error: {exc}"
    except ParseError as exc:
        return EXIT_USAGE, f"usage error: {exc}"
    except DomainError as exc:
        msg = {"error": type(exc).__name__, "message": str(exc)}
        return EXIT_DOMAIN, json.dumps(msg) if "--json" in argv else f"domain error ({type(exc).__name__}): {exc}"
    code = EXIT_OK if ok else EXIT_FALSE
    if a.json:
        payload = {"command": a.command, "ok": bool(ok), **payload}
        return code, json.dumps(payload, default=str)
    return code, text


def run(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv in (["-h"], ["--help"]) or argv[:1] == ["help"]:
        build_parser().print_help()
        return EXIT_OK
    if "-h" in argv or "--help" in argv:
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:  # argparse printed help
            return int(exc.code or 0)
        except UsageError as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE
    try:
        top, _ = build_parser().parse_known_args(argv)
    except UsageError:
        top = None
    if top is not None and top.input and not top.command:
        return run_batch(top.input, top.json, top.jobs)
    code, out = execute(argv)
    print(out, file=sys.stderr if code in (EXIT_USAGE, EXIT_DOMAIN) and not out.startswith("{") else sys.stdout)
    return code


def run_batch(path: str, as_json: bool, jobs: int) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            tasks = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    def one(line):
        try:
            argv = shlex.split(line)
        except ValueError as exc:
            return EXIT_USAGE, f"usage error: {exc}"
        if as_json and "--json" not in argv:
            argv.append("--json")
        return execute(argv)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        results = list(pool.map(one, tasks))  # map keeps input order
    for code, out in results:
        print(out)
    return max((c for c, _ in results), default=EXIT_OK)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
