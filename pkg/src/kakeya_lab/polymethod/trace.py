"""Executable trace of the polynomial-method argument for the covering bound.

Steps:
  1. beta, the bound C(beta + n, n) and the size test;
  2. the point set S = {(zeta_{s_1}, ..., zeta_{s_n}) : s in E} in L_N;
  3. a vanishing polynomial g of degree <= beta over L_N and its residue gbar;
  4. for every direction w in Omega: h_w, its residue and v_X(hbar_w);
  5. the counting lemma on gbar with theta = eps / n and the final chain.

A genuine (eps, nu)-Kakeya set always stops at step 1.  With
``forced_degree`` the trace skips that stop and solves with the least degree
d having C(d + n, n) > |E|, so undersized inputs can be pushed through the
later steps to see which assertion breaks.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .. import __version__
from ..errors import DomainError, PrecisionError, PreconditionError
from ..galois import INF, FqPoly
from ..kakeya import (RSpace, as_fraction, covering_beta, greedy_small_kakeya, is_full_kakeya, profile,
                      rspace)
from ..lubin_tate import ExtField, bracket_poly, build_extension, s_map
from ..rng import make_rng
from .multipoly import ExtCoeffs, MultiPoly
from .reduction import compose_line, residue_on_C, residue_reduce
from .solver import solve_vanishing
from .sz import sz_bound, sz_count, sz_threshold

TRACE_SCHEMA = "kakeya-lab/trace-v1"


def _num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if x == INF:
        return "inf"
    return x


_RELATIONS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


@dataclass
class Assertion:
    step: int
    name: str
    lhs: object
    relation: str
    rhs: object
    holds: bool

    @classmethod
    def check(cls, step, name, lhs, relation, rhs) -> "Assertion":
        return cls(step, name, lhs, relation, rhs, bool(_RELATIONS[relation](lhs, rhs)))

    def to_json(self) -> dict:
        return {"step": self.step, "name": self.name, "lhs": _num(self.lhs), "relation": self.relation,
                "rhs": _num(self.rhs), "holds": self.holds}


@dataclass
class ProofTrace:
    q: int
    k: int
    n: int
    epsilon: Fraction
    nu: Fraction
    E: list[tuple[int, ...]]
    forced_degree: bool
    N: int | None = None
    beta: int | None = None
    bound: int | None = None
    degree: int | None = None
    precision_raised: bool = False
    steps: list[dict] = dc_field(default_factory=list)
    assertions: list[Assertion] = dc_field(default_factory=list)
    terminated_at: int | None = None
    failure: str | None = None

    @property
    def completed(self) -> bool:
        """Ran through step 5 with every assertion true (a contradiction)."""
        return self.terminated_at is None and all(a.holds for a in self.assertions)

    @property
    def verdict(self) -> str:
        if self.terminated_at == 1:
            return "terminated at step 1: |E| >= C(beta+n, n), no contradiction to derive"
        if self.terminated_at is not None:
            return f"terminated at step {self.terminated_at}: {self.failure} fails"
        return "completed with every assertion true: CONTRADICTION (THEOREM VIOLATION)"

    def step_data(self, step: int) -> dict:
        for s in self.steps:
            if s["step"] == step:
                return s
        raise KeyError(step)

    def to_json(self) -> dict:
        return {
            "schema": TRACE_SCHEMA,
            "version": __version__,
            "params": {"q": self.q, "k": self.k, "n": self.n, "epsilon": _num(self.epsilon),
                       "nu": _num(self.nu), "forced_degree": self.forced_degree, "N": self.N},
            "E": [list(v) for v in self.E],
            "beta": self.beta, "bound": self.bound, "degree": self.degree,
            "precision_raised": self.precision_raised,
            "steps": self.steps,
            "assertions": [a.to_json() for a in self.assertions],
            "terminated_at": self.terminated_at,
            "failure": self.failure,
            "completed": self.completed,
            "verdict": self.verdict,
        }


def _points_S(L: ExtField, E: Sequence[tuple[int, ...]]):
    return [tuple(L.zeta(a) for a in v) for v in E]


def _step1(tr: ProofTrace) -> bool:
    """Returns True when the trace should stop here."""
    tr.beta = covering_beta(tr.epsilon, tr.nu, tr.k, tr.n, tr.q)
    tr.bound = comb(tr.beta + tr.n, tr.n)
    size = len(tr.E)
    a = Assertion.check(1, "|E| < C(beta+n, n)", size, "<", tr.bound)
    tr.assertions.append(a)
    if tr.forced_degree:
        d = 0
        while comb(d + tr.n, tr.n) <= size:
            d += 1
        tr.degree = d
    else:
        tr.degree = tr.beta
    tr.steps.append({"step": 1, "name": "size test", "size": size, "beta": tr.beta, "bound": tr.bound,
                     "degree": tr.degree, "forced_degree": tr.forced_degree})
    if not a.holds and not tr.forced_degree:
        tr.terminated_at, tr.failure = 1, a.name
        return True
    return False


def _step3_checks(tr: ProofTrace, L: ExtField, S, g: MultiPoly) -> tuple[MultiPoly, int]:
    """Vanishing, degree and residue checks for a given g (used by the solver and by replay)."""
    q, k = tr.q, tr.k
    residual = L.horizon
    for s in S:
        val = g(s)
        if not val.is_zero():
            raise PrecisionError(f"step 3: g(s) = {val.format()} is nonzero to working precision")
        residual = min(residual, val.prec)
    gbar = residue_reduce(g)
    delta = k * L.e  # sum of v_L(zeta_c) over c != 0 in R
    tr.assertions.append(Assertion.check(3, "deg g <= degree bound", g.total_degree, "<=", tr.degree))
    tr.assertions.append(Assertion.check(3, "gbar != 0", len(gbar.terms), "!=", 0))
    tr.assertions.append(Assertion.check(3, "vanishing precision > k*e", residual, ">=", delta + 1))
    return gbar, residual


def _direction_data(tr: ProofTrace, space: RSpace, L: ExtField, Emask: np.ndarray, g: MultiPoly | None,
                    gbar: MultiPoly, d: int, base: int) -> tuple[dict, list[Assertion]]:
    R = space.ring
    w = space.directions[d]
    b = space.point(base)
    J = [a for a in R.elements() if Emask[space.flat(tuple(R.add(bi, R.mul(a, wi)) for bi, wi in zip(b, w)))]]
    s_w = [s_map(R, wi) for wi in w]
    hbar = residue_on_C(gbar, s_w)
    v = hbar.valuation()
    eq_k = tr.epsilon * space.Q
    entry = {"w": list(w), "b_w": list(b), "J_w": J, "hbar_w": hbar.to_list(), "hbar_w_text": hbar.format(),
             "v_X": _num(v)}
    checks = [Assertion.check(4, f"|J_w| >= eps q^k at w={list(w)}", len(J), ">=", eq_k)]
    if g is not None:
        h = compose_line(g, [L.zeta(bi) for bi in b], [bracket_poly(R, wi) for wi in w])
        hres = h.residue()
        entry["h_w"] = h.to_json()
        entry["h_w_degree"] = h.degree
        checks.append(Assertion.check(4, f"deg h_w <= deg g * q^(k-1) at w={list(w)}", h.degree, "<=",
                                      g.total_degree * space.q ** (space.k - 1)))
        checks.append(Assertion.check(4, f"residue(h_w) == gbar(s_w) at w={list(w)}",
                                      hres.to_list(), "==", hbar.to_list()))
    checks.append(Assertion.check(4, f"v_X(hbar_w) >= |J_w| at w={list(w)}", v, ">=", len(J)))
    checks.append(Assertion.check(4, f"v_X(hbar_w) >= eps q^k at w={list(w)}", v, ">=", eq_k))
    return entry, checks


def _step4(tr, space, L, g, gbar, omega, bases):
    Emask = space.mask(tr.E)
    dirs, checks = [], []
    for d in omega:
        entry, cs = _direction_data(tr, space, L, Emask, g, gbar, int(d), int(bases[int(d)]))
        dirs.append(entry)
        checks.extend(cs)
    return dirs, checks


def _step5(tr: ProofTrace, space: RSpace, gbar: MultiPoly, omega_size: int):
    q, k, n = tr.q, tr.k, tr.n
    theta = tr.epsilon / n
    data = {"step": 5, "name": "counting lemma and chain", "theta": _num(theta), "omega_size": omega_size}
    checks = []
    try:
        count = sz_count(gbar, theta, k)
        bound = sz_bound(gbar.leading_exponent, theta, k, n, q)
        data.update({"sz_count": count, "sz_bound": _num(bound), "sz_threshold": _num(sz_threshold(gbar, theta, k))})
        checks.append(Assertion.check(5, "|Omega| <= sz_count(gbar)", omega_size, "<=", count))
        checks.append(Assertion.check(5, "sz_count < sz_bound", count, "<", bound))
    except PreconditionError as exc:
        data["sz_error"] = str(exc)
        checks.append(Assertion(5, "counting lemma preconditions", str(exc), "==", "ok", False))
    mid = Fraction(tr.degree * k * q ** (k * (n - 1) + 1) * n) / tr.epsilon
    target = tr.nu * q ** (k * n)
    data["chain"] = {"nu_q_kn": _num(target), "omega": omega_size, "deg_k_q_n_over_eps": _num(mid)}
    checks.append(Assertion.check(5, "(a) nu q^(kn) <= |Omega|", target, "<=", omega_size))
    checks.append(Assertion.check(5, "(b) |Omega| < d k q^(k(n-1)+1) n / eps", omega_size, "<", mid))
    checks.append(Assertion.check(5, "(c) d k q^(k(n-1)+1) n / eps <= nu q^(kn)", mid, "<=", target))
    return data, checks


def _finish_step(tr: ProofTrace, step: int, checks: list[Assertion]) -> bool:
    tr.assertions.extend(checks)
    bad = next((a for a in checks if not a.holds), None)
    if bad is not None:
        tr.terminated_at, tr.failure = step, bad.name
        return True
    return False


def _resolve_omega(space: RSpace, E, eps, omega, lines):
    prof = profile(space, E)
    if omega is None:
        omega = prof.omega(eps)
    else:
        omega = np.asarray(sorted({space.direction_index[tuple(w)] if not isinstance(w, (int, np.integer)) else int(w)
                                   for w in omega}), dtype=np.int64)
    bases = prof.best_base.copy()
    for w, b in (lines or {}).items():
        d = space.direction_index[tuple(w)] if not isinstance(w, (int, np.integer)) else int(w)
        bases[d] = space.flat(b)
    return omega, bases


def proof_trace(E: Iterable[Sequence[int]], eps, nu, q: int, k: int, n: int, *, omega=None, lines=None,
                forced_degree: bool = False, N: int | None = None, auto_raise: bool = True) -> ProofTrace:
    """Run the argument on E and record every object and comparison.

    ``omega`` (direction tuples or indices) overrides the directions taken
    from the profile of E; ``lines`` maps a direction to the base point of
    its witnessing line.  On a precision error the extension is rebuilt once
    with twice the t-adic precision.
    """
    eps, nu = as_fraction(eps), as_fraction(nu)
    space = rspace(q, k, n)
    E = sorted({tuple(int(x) for x in v) for v in E})
    for v in E:
        if len(v) != n or not all(0 <= x < space.Q for x in v):
            raise DomainError(f"point {v} is not in R^{n}")
    N = k + 2 if N is None else N
    try:
        return _run(E, eps, nu, space, omega, lines, forced_degree, N, False)
    except PrecisionError:
        if not auto_raise:
            raise
        return _run(E, eps, nu, space, omega, lines, forced_degree, 2 * N, True)


def _run(E, eps, nu, space, omega, lines, forced, N, raised) -> ProofTrace:
    q, k, n = space.q, space.k, space.n
    tr = ProofTrace(q, k, n, eps, nu, E, forced, N, precision_raised=raised)
    if _step1(tr):
        return tr
    L = build_extension(q, k, N)
    S = _points_S(L, E)
    tr.steps.append({"step": 2, "name": "point set in L_N", "N": N, "e": L.e, "extension": L.to_json(),
                     "S": [[c.to_json() for c in s] for s in S]})
    try:
        g, info = solve_vanishing(S, tr.degree, ExtCoeffs(L), n)
        gbar, residual = _step3_checks(tr, L, S, g)
    except PrecisionError as exc:
        raise PrecisionError(f"step 3 (N={N}): {exc}") from exc
    tr.steps.append({"step": 3, "name": "vanishing polynomial", "g": g.to_json(), "gbar": gbar.to_json(),
                     "rank": info.rank, "free_column": info.free_column,
                     "basis": [list(e) for e in info.basis], "vanishing_precision": residual,
                     "coefficient_precision": info.coefficient_precision})
    bad = next((a for a in tr.assertions if a.step == 3 and not a.holds), None)
    if bad is not None:
        tr.terminated_at, tr.failure = 3, bad.name
        return tr
    om, bases = _resolve_omega(space, E, eps, omega, lines)
    try:
        dirs, checks = _step4(tr, space, L, g, gbar, om, bases)
    except PrecisionError as exc:
        raise PrecisionError(f"step 4 (N={N}): {exc}") from exc
    tr.steps.append({"step": 4, "name": "restriction to lines", "directions": dirs})
    if _finish_step(tr, 4, checks):
        return tr
    data, checks = _step5(tr, space, gbar, len(om))
    tr.steps.append(data)
    _finish_step(tr, 5, checks)
    return tr


# --- replay ------------------------------------------------------------------------


@dataclass
class ReplayReport:
    ok: bool
    mismatches: list[str]
    verdict: str
    recorded_verdict: str

    def to_json(self) -> dict:
        return {"ok": self.ok, "mismatches": self.mismatches, "verdict": self.verdict,
                "recorded_verdict": self.recorded_verdict}


def replay_trace(data: dict) -> ReplayReport:
    """Re-check a serialized trace from its recorded objects, without solving for g.

    Every recorded assertion is recomputed from E, the parameters and the
    recorded g; the report lists any disagreement.
    """
    if data.get("schema") != TRACE_SCHEMA:
        raise DomainError(f"not a proof trace (schema {data.get('schema')!r})")
    p = data["params"]
    q, k, n = int(p["q"]), int(p["k"]), int(p["n"])
    eps, nu = Fraction(str(p["epsilon"])), Fraction(str(p["nu"]))
    space = rspace(q, k, n)
    E = [tuple(v) for v in data["E"]]
    tr = ProofTrace(q, k, n, eps, nu, E, bool(p["forced_degree"]), p.get("N"))
    mismatches: list[str] = []
    stopped = _step1(tr)
    if not stopped and data.get("terminated_at") != 1:
        step3 = next((s for s in data["steps"] if s["step"] == 3), None)
        if step3 is None:
            mismatches.append("step 3 missing from a trace that passed step 1")
        else:
            N = int(tr.N)
            L = build_extension(q, k, N)
            S = _points_S(L, E)
            rec2 = next(s for s in data["steps"] if s["step"] == 2)
            if rec2["S"] != [[c.to_json() for c in s] for s in S]:
                mismatches.append("step 2: recorded S differs from the recomputed points")
            g = MultiPoly.from_json(step3["g"])
            try:
                gbar, residual = _step3_checks(tr, L, S, g)
            except PrecisionError as exc:
                mismatches.append(str(exc))
                gbar, residual = residue_reduce(g), None
            if MultiPoly.from_json(step3["gbar"]) != gbar:
                mismatches.append("step 3: recorded gbar is not the residue of g")
            if any(a.step == 3 and not a.holds for a in tr.assertions):
                tr.terminated_at, tr.failure = 3, next(a.name for a in tr.assertions if a.step == 3 and not a.holds)
            else:
                rec4 = next((s for s in data["steps"] if s["step"] == 4), {"directions": []})
                omega = [space.direction_index[tuple(dd["w"])] for dd in rec4["directions"]]
                bases = np.zeros(space.ndirections, dtype=np.int64)
                for dd in rec4["directions"]:
                    bases[space.direction_index[tuple(dd["w"])]] = space.flat(dd["b_w"])
                dirs, checks = _step4(tr, space, L, g, gbar, omega, bases)
                for new, old in zip(dirs, rec4["directions"]):
                    for key in ("J_w", "hbar_w", "v_X", "h_w"):
                        if new.get(key) != old.get(key):
                            mismatches.append(f"step 4: {key} differs at w={new['w']}")
                if not _finish_step(tr, 4, checks):
                    rec5 = next((s for s in data["steps"] if s["step"] == 5), None)
                    data5, checks5 = _step5(tr, space, gbar, len(omega))
                    if rec5 is None:
                        mismatches.append("step 5 missing")
                    else:
                        for key in ("sz_count", "sz_bound", "chain"):
                            if data5.get(key) != rec5.get(key):
                                mismatches.append(f"step 5: {key} differs")
                    _finish_step(tr, 5, checks5)
    recorded = [dict(a) for a in data.get("assertions", [])]
    fresh = [a.to_json() for a in tr.assertions]
    if recorded != fresh:
        mismatches.append("recorded assertions differ from the recomputed ones")
    if tr.terminated_at != data.get("terminated_at"):
        mismatches.append(f"termination step {tr.terminated_at} != recorded {data.get('terminated_at')}")
    return ReplayReport(not mismatches, mismatches, tr.verdict, data.get("verdict", ""))


# --- instance generators ---------------------------------------------------------------


def genuine_instance(space: RSpace, rng) -> tuple[frozenset, Fraction, Fraction]:
    """A verified (eps, nu)-Kakeya set: a greedy Kakeya set or a random dense set."""
    rng = make_rng(rng)
    if rng.random() < 0.5:
        E = greedy_small_kakeya(space.k, space.n, space.q, rng, space=space)
    else:
        m = int(rng.integers(space.npoints // 4, space.npoints + 1))
        E = frozenset(space.point(int(i)) for i in rng.choice(space.npoints, size=m, replace=False))
    prof = profile(space, E)
    while True:
        eps = Fraction(int(rng.integers(1, 5)), 4)
        nu = prof.nu(eps)
        if nu > 0:
            return E, eps, nu


def adversarial_instance(space: RSpace, rng) -> dict:
    """An undersized set with an inflated claim, to be traced with ``forced_degree``.

    Flavour "full": a greedy Kakeya set with points deleted until some
    direction loses its full line, claimed to be (1, 1 - q^-n)-Kakeya with
    every direction in Omega.  Flavour "inflated": a small random set whose
    true Omega is claimed together with a larger nu.
    """
    rng = make_rng(rng)
    q, n, k = space.q, space.n, space.k
    if rng.random() < 0.5:
        E = set(greedy_small_kakeya(k, n, q, rng, space=space))
        while is_full_kakeya(space, E):
            E.discard(sorted(E)[int(rng.integers(len(E)))])
        return {"flavour": "full", "E": frozenset(E), "eps": Fraction(1),
                "nu": 1 - Fraction(1, q**n), "omega": list(range(space.ndirections))}
    while True:
        m = int(rng.integers(1, max(2, space.npoints // 2)))
        E = frozenset(space.point(int(i)) for i in rng.choice(space.npoints, size=m, replace=False))
        prof = profile(space, E)
        eps = Fraction(int(rng.integers(1, 3)), 2)
        om = prof.omega(eps)
        if len(om):
            nu = min(Fraction(1), prof.nu(eps) + Fraction(int(rng.integers(1, 4)), q ** (k * n)))
            return {"flavour": "inflated", "E": E, "eps": eps, "nu": nu, "omega": [int(d) for d in om]}
