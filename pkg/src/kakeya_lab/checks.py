"""Exhaustive self-tests of the Lubin-Tate layer, shared by the CLI and the test suite."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import KakeyaLabError
from .laurent import quotient_ring
from .lubin_tate import (apply_f, bracket_poly, bracket_series, build_extension, eisenstein_factor,
                         iterate_f, lubin_tate_f, module_action, newton_check, newton_polygon, order_of,
                         s_map)


@dataclass
class Check:
    name: str
    passed: bool
    cases: int
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "cases": self.cases, "detail": self.detail}


@dataclass
class SelfTestReport:
    q: int
    k: int
    checks: list[Check] = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def get(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_json(self) -> dict:
        return {"q": self.q, "k": self.k, "passed": self.passed, "checks": [c.to_json() for c in self.checks]}


def _run(report: SelfTestReport, name: str, fn):
    try:
        ok, cases, detail = fn()
    except KakeyaLabError as exc:
        ok, cases, detail = False, 0, f"{type(exc).__name__}: {exc}"
    report.checks.append(Check(name, bool(ok), cases, detail))


def commutation(q: int, k: int):
    """[a]_f o f == f o [a]_f modulo t^{k+2} for every a in A_k."""
    R = quotient_ring(q, k)
    f = lubin_tate_f(q)
    bad = []
    for a in R.elements():
        P = bracket_poly(R, a)
        if P.compose(f).truncate_t(k + 2) != f.compose(P).truncate_t(k + 2):
            bad.append(R.format(a))
    return not bad, q**k, ", ".join(bad[:5])


def residue_is_s(q: int, k: int):
    """[a]_f mod t == s_a."""
    R = quotient_ring(q, k)
    bad = [R.format(a) for a in R.elements() if bracket_poly(R, a).residue() != s_map(R, a)]
    return not bad, q**k, ", ".join(bad[:5])


def series_agreement(q: int, k: int):
    """The recursive series and the finite sum agree on X^{q^m}, m < k, to the series' precision."""
    R = quotient_ring(q, k)
    prec = 2 * k + 2
    bad = []
    for a in R.elements():
        ser = bracket_series(R.to_series(a, prec), terms=k)
        P = bracket_poly(R, a)
        for m in range(k):
            e = q**m
            p = ser.prec[e]
            if ser.coeff(e).truncate(p) != P.coeff(e).truncate(p):
                bad.append(f"{R.format(a)} at X^{e}")
    return not bad, q**k * k, ", ".join(bad[:5])


def eisenstein(q: int, k: int):
    g = eisenstein_factor(q, k)
    e = q ** (k - 1) * (q - 1)
    v = newton_check(g)
    poly = newton_polygon(g)
    ok = v == Fraction(1, e) and g.degree == e and poly == [(Fraction(-1, e), e)]
    return ok, 1, f"deg g_k = {g.degree}, root valuation {v}, polygon {[(str(s), w) for s, w in poly]}"


def module_structure(q: int, k: int):
    """Orbit of zeta_1 has q^k elements, is additive, is killed by f^{k}, and zeta_1 has order k."""
    L = build_extension(q, k)
    R = L.ring
    orbit = L.orbit()
    problems = []
    if len({z.key() for z in orbit.values()}) != q**k:
        problems.append("orbit size")
    keys = {z.key() for z in orbit.values()}
    for a in R.elements():
        for b in R.elements():
            if orbit[a] + orbit[b] != orbit[R.add(a, b)] or (orbit[a] + orbit[b]).key() not in keys:
                problems.append(f"addition {R.format(a)} + {R.format(b)}")
                break
    for a, z in orbit.items():
        y = z
        for _ in range(k):
            y = apply_f(y)
        if not y.is_zero():
            problems.append(f"f^k(zeta_{R.format(a)}) != 0")
    if order_of(L.zeta1) != k:
        problems.append(f"order_of(zeta_1) = {order_of(L.zeta1)}")
    for a in R.elements():
        if a and orbit[a].valuation() != q ** R.valuation(a):
            problems.append(f"v_L(zeta_{R.format(a)})")
    return not problems, q**k, "; ".join(problems[:5])


def module_action_consistency(q: int, k: int):
    """[a]_f(zeta_b) == zeta_{ab} and [a]_f(X) evaluated directly agrees with the iterate sum."""
    L = build_extension(q, k)
    R = L.ring
    bad = []
    for a in R.elements():
        P = bracket_poly(R, a)
        for b in R.elements():
            z = L.zeta(b)
            want = L.zeta(R.mul(a, b))
            if module_action(a, z) != want or P.evaluate(z) != want:
                bad.append(f"a={R.format(a)}, b={R.format(b)}")
    return not bad, q ** (2 * k), ", ".join(bad[:5])


def iterate_degree(q: int, k: int):
    F = iterate_f(q, k)
    return F.degree == q**k and F.is_additive(), 1, f"deg f^k = {F.degree}"


def lt_selftest(q: int, k: int) -> SelfTestReport:
    rep = SelfTestReport(q, k)
    _run(rep, "commutation mod t^(k+2)", lambda: commutation(q, k))
    _run(rep, "residue of [a]_f is s_a", lambda: residue_is_s(q, k))
    _run(rep, "recursive series agrees with iterate sum", lambda: series_agreement(q, k))
    _run(rep, "f^k additive of degree q^k", lambda: iterate_degree(q, k))
    _run(rep, "g_k Eisenstein with root valuation 1/e", lambda: eisenstein(q, k))
    _run(rep, "orbit of zeta_1 is A/t^k", lambda: module_structure(q, k))
    _run(rep, "module action matches zeta_ab", lambda: module_action_consistency(q, k))
    return rep
