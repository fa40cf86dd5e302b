import json
from fractions import Fraction
from itertools import product
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kakeya_lab.errors import DomainError, PreconditionError
from kakeya_lab.galois import FqElem, FqPoly, field
from kakeya_lab.kakeya import greedy_small_kakeya, rspace
from kakeya_lab.laurent import quotient_ring
from kakeya_lab.lubin_tate import bracket_poly, build_extension, s_map
from kakeya_lab.polymethod import (BCoeffs, ExtCoeffs, FqCoeffs, MultiPoly, adversarial_instance,
                                   compose_line, exhaustive_sweep, genuine_instance, lagrange_check,
                                   leading_identity, monomial_basis, proof_trace, random_poly, random_sweep,
                                   replay_trace, residue_on_C, residue_reduce, solve_vanishing, sz_bound,
                                   sz_count, sz_verify, vanishing_polynomial)
from kakeya_lab.polymethod.sz import RatFunc

F2 = field(2)


def fq_points(q, pts):
    F = field(q)
    return [tuple(FqElem(F, x) for x in p) for p in pts]


def B(q, *coeffs):
    return FqPoly(field(q), coeffs)


# --- monomials and the solver -------------------------------------------------------------


def test_monomial_basis_order():
    assert monomial_basis(2, 2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(monomial_basis(3, 4)) == comb(7, 3)


def test_solver_examples():
    g = vanishing_polynomial(fq_points(2, [(0,)]), 1)
    assert g.format() == "z1"
    g = vanishing_polynomial(fq_points(2, product(range(2), repeat=2)), 2)
    assert g.format() == "z1^2 + z1"
    assert g.leading_exponent == (2, 0)


def test_solver_size_guard():
    pts = fq_points(3, [(a, b) for a in range(3) for b in range(2)])  # 6 = C(2+2, 2)
    with pytest.raises(PreconditionError):
        vanishing_polynomial(pts, 2)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_solver_exhaustive_over_F2_plane(d):
    allpts = list(product(range(2), repeat=2))
    for r in range(1, len(allpts) + 1):
        for mask in range(1 << len(allpts)):
            S = [p for i, p in enumerate(allpts) if mask >> i & 1]
            if len(S) != r or len(S) >= comb(d + 2, 2):
                continue
            g = vanishing_polynomial(fq_points(2, S), d)
            assert not g.is_zero() and g.total_degree <= d
            assert all(g(s).is_zero() for s in fq_points(2, S))


@given(st.sampled_from([3, 4, 5]), st.integers(1, 3), st.data())
def test_solver_random_over_Fq(q, d, data):
    n = 2
    size = data.draw(st.integers(0, comb(n + d, n) - 1))
    pts = data.draw(st.lists(st.tuples(st.integers(0, q - 1), st.integers(0, q - 1)),
                             min_size=size, max_size=size))
    S = fq_points(q, pts)
    g = vanishing_polynomial(S, d, FqCoeffs(field(q)), n)
    assert not g.is_zero() and g.total_degree <= d
    assert all(g(s).is_zero() for s in S)
    assert not g.leading_coeff.is_zero()


@pytest.mark.parametrize("q,k,n,seed", [(2, 2, 2, 0), (2, 2, 2, 1), (3, 1, 2, 2), (2, 3, 2, 3)])
def test_solver_over_extension(q, k, n, seed):
    L = build_extension(q, k, 2 * (k + 2))
    rng = np.random.default_rng(seed)
    Q = q**k
    d = 2
    m = comb(n + d, n) - 1
    pts = {tuple(int(x) for x in rng.integers(0, Q, size=n)) for _ in range(m)}
    S = [tuple(L.zeta(a) for a in p) for p in pts]
    g, info = solve_vanishing(S, d, ExtCoeffs(L), n)
    assert g.total_degree <= d
    assert min(c.valuation() for c in g.terms.values()) == 0
    assert not residue_reduce(g).is_zero()
    for s in S:
        assert g(s).is_zero()
    assert info.rank + 1 <= len(info.basis)


# --- Schwartz-Zippel ----------------------------------------------------------------------


def oracle_count(f, theta, k):
    """Straight evaluation of f at every point of C^n, independent of the library's counters."""
    q = f.ring.F.q
    R = quotient_ring(q, k)
    C = [s_map(R, a) for a in R.elements()]
    lead = f.terms[max(f.terms)]
    T = lead.valuation() + Fraction(theta) * f.n * q**k
    count = 0
    for y in product(C, repeat=f.n):
        acc = FqPoly(f.ring.F)
        for e, c in f.terms.items():
            term = c
            for yi, m in zip(y, e):
                term = term * yi**m
            acc = acc + term
        if acc.valuation() >= T:
            count += 1
    return count


def test_sz_examples():
    ring = BCoeffs(F2)
    z = MultiPoly.variable(1, ring, 0)
    assert sz_count(z, 1, 2) == oracle_count(z, 1, 2) == 1
    assert sz_bound((1,), 1, 2, 1, 2) == 4
    rep = sz_verify(z, 1, 2)
    assert rep.passed and rep.status == "pass" and rep.count == 1 and rep.bound == 4
    c = MultiPoly.constant(1, ring, B(2, 0, 1, 1))
    for th in (Fraction(1, 8), Fraction(1, 2), 1):
        assert sz_count(c, th, 2) == 0
        assert sz_verify(c, th, 2).passed
        assert sz_bound((0,), th, 2, 1, 2) >= 4


def test_sz_preconditions():
    ring = BCoeffs(F2)
    z = MultiPoly.variable(1, ring, 0)
    with pytest.raises(PreconditionError):
        sz_count(z**4, 1, 2)
    with pytest.raises(PreconditionError):
        sz_count(z, 0, 2)
    with pytest.raises(PreconditionError):
        sz_count(z, Fraction(3, 2), 2)
    with pytest.raises(PreconditionError):
        sz_count(MultiPoly(1, ring), 1, 2)


@pytest.mark.parametrize("q,k,n", [(2, 2, 1), (2, 2, 2), (3, 1, 2), (2, 3, 1), (3, 2, 1), (4, 1, 2)])
def test_sz_counters_agree_with_oracle(q, k, n):
    rng = np.random.default_rng(q * 100 + k * 10 + n)
    for _ in range(25):
        f = random_poly(q, k, n, rng)
        th = Fraction(int(rng.integers(1, 9)), 8)
        want = oracle_count(f, th, k)
        assert sz_count(f, th, k, method="exact") == want
        if field(q).m == 1:
            assert sz_count(f, th, k, method="fast") == want
        rep = sz_verify(f, th, k)
        assert rep.count <= q ** (n * k) and rep.passed


def test_sz_exhaustive_sweep():
    res = exhaustive_sweep(2, 2, 1, 3, 2, (Fraction(1, 2), 1))
    assert res.cases == 2 * (8**4 - 1)
    assert res.passed


@pytest.mark.parametrize("q,k,n", [(2, 1, 2), (2, 3, 2), (3, 2, 2), (3, 3, 1)])
def test_sz_random_sweep(q, k, n):
    res = random_sweep(q, k, n, 60, seed=9)
    assert res.cases == 60 and res.passed
    assert random_sweep(q, k, n, 10, seed=4).to_json() == random_sweep(q, k, n, 10, seed=4).to_json()


# --- Lagrange oracle ----------------------------------------------------------------------


def test_lagrange_examples():
    coeffs = lagrange_check([(B(2), B(2)), (B(2, 1), B(2, 1))])
    assert [c.num.to_list() for c in coeffs] == [[], [1]]
    nodes = [B(2), B(2, 0, 1), B(2, 0, 0, 1)]
    coeffs = lagrange_check([(x, x * x) for x in nodes])
    assert [c.is_zero() for c in coeffs] == [True, True, False]
    assert coeffs[2] == RatFunc(B(2, 1))
    with pytest.raises(DomainError):
        lagrange_check([(B(2, 1), B(2)), (B(2, 1), B(2, 1))])


@pytest.mark.parametrize("q,k", [(2, 2), (3, 1), (2, 3)])
def test_leading_identity(q, k):
    R = quotient_ring(q, k)
    C = [s_map(R, a) for a in R.elements()]
    rng = np.random.default_rng(q + k)
    for deg in range(1, min(len(C), 4)):
        coeffs = [FqPoly(field(q), rng.integers(0, q, size=3).tolist()) for _ in range(deg)]
        coeffs.append(FqPoly(field(q), [0, 1, 1]))
        nodes = [C[int(i)] for i in rng.choice(len(C), size=deg + 1, replace=False)]
        total, lead = leading_identity(coeffs, nodes)
        assert total == lead


# --- residue reduction and restriction to lines --------------------------------------------


def test_compose_examples():
    L = build_extension(2, 2)
    R = L.ring
    g = MultiPoly.variable(1, ExtCoeffs(L), 0)
    h = compose_line(g, [L.zero()], [bracket_poly(R, 1)])
    assert h.residue() == FqPoly(F2, [0, 1]) and h.residue().valuation() == 1
    h = compose_line(g, [L.zero()], [bracket_poly(R, 2)])
    assert h.residue() == FqPoly(F2, [0, 0, 1]) and h.residue().valuation() == 2
    with pytest.raises(DomainError):
        compose_line(g, [L.one()], [bracket_poly(R, 1)])
    with pytest.raises(DomainError):
        residue_reduce(MultiPoly.variable(1, BCoeffs(F2), 0))


def random_ext_poly(L, n, d, rng):
    ring = ExtCoeffs(L)
    terms = {}
    for e in monomial_basis(n, d):
        if rng.random() < 0.6:
            terms[e] = L.scalar(int(rng.integers(0, L.ring.size))) + L.zeta(int(rng.integers(0, L.ring.size)))
    return MultiPoly(n, ring, terms)


@pytest.mark.parametrize("q,k,n", [(2, 2, 2), (3, 1, 2), (2, 3, 2), (3, 2, 1)])
def test_residue_commutes_with_restriction(q, k, n):
    L = build_extension(q, k)
    R = L.ring
    rng = np.random.default_rng(q * k * n)
    sp = rspace(q, k, n)
    for _ in range(12):
        g = random_ext_poly(L, n, 3, rng)
        w = sp.directions[int(rng.integers(sp.ndirections))]
        b = sp.point(int(rng.integers(sp.npoints)))
        h = compose_line(g, [L.zeta(x) for x in b], [bracket_poly(R, x) for x in w])
        assert h.degree <= max(g.total_degree, 0) * q ** (k - 1)
        assert h.residue() == residue_on_C(residue_reduce(g), [s_map(R, x) for x in w])


def test_multipoly_json_roundtrip():
    L = build_extension(3, 2)
    g = random_ext_poly(L, 2, 2, np.random.default_rng(1))
    assert MultiPoly.from_json(json.loads(json.dumps(g.to_json()))) == g
    f = MultiPoly(2, BCoeffs(F2), {(1, 2): B(2, 1, 1), (0, 0): B(2, 0, 1)})
    assert MultiPoly.from_json(f.to_json()) == f


# --- proof trace ------------------------------------------------------------------------


def test_trace_full_space_stops_at_step_one():
    sp = rspace(2, 2, 2)
    tr = proof_trace(sp.points(), 1, 1, 2, 2, 2)
    assert tr.terminated_at == 1 and tr.bound == 1 and tr.beta == 0
    assert not tr.completed
    assert replay_trace(json.loads(json.dumps(tr.to_json()))).ok


def test_trace_single_line_forced():
    sp = rspace(2, 2, 2)
    E = [(a, 0) for a in range(4)]
    tr = proof_trace(E, 1, Fraction(1, 16), 2, 2, 2, omega=[(1, 0)], forced_degree=True)
    step4 = [a for a in tr.assertions if a.step == 4]
    assert step4 and all(a.holds for a in step4)
    assert tr.step_data(4)["directions"][0]["J_w"] == [0, 1, 2, 3]
    assert tr.terminated_at == 5 and not tr.completed
    rep = replay_trace(json.loads(json.dumps(tr.to_json())))
    assert rep.ok, rep.mismatches


def test_trace_full_space_forced_fails_on_precondition():
    sp = rspace(2, 2, 2)
    tr = proof_trace(sp.points(), 1, Fraction(3, 4), 2, 2, 2, forced_degree=True)
    assert tr.degree == 5 and tr.terminated_at == 5
    assert tr.failure == "counting lemma preconditions"


def test_replay_detects_tampering():
    E = [(a, 0) for a in range(4)]
    tr = proof_trace(E, 1, Fraction(1, 16), 2, 2, 2, omega=[(1, 0)], forced_degree=True)
    data = json.loads(json.dumps(tr.to_json()))
    bad = json.loads(json.dumps(data))
    bad["steps"][-1]["sz_count"] = 0
    assert not replay_trace(bad).ok
    bad = json.loads(json.dumps(data))
    bad["terminated_at"] = None
    assert not replay_trace(bad).ok
    bad = json.loads(json.dumps(data))
    step3 = next(s for s in bad["steps"] if s["step"] == 3)
    step3["g"]["terms"] = step3["g"]["terms"][1:]
    assert not replay_trace(bad).ok
    with pytest.raises(DomainError):
        replay_trace({"schema": "other"})


def test_genuine_instances_stop_at_step_one():
    sp = rspace(2, 2, 2)
    rng = np.random.default_rng(5)
    for _ in range(10):
        E, eps, nu = genuine_instance(sp, rng)
        assert proof_trace(E, eps, nu, 2, 2, 2).terminated_at == 1


def test_adversarial_instances_never_complete():
    sp = rspace(2, 2, 2)
    rng = np.random.default_rng(6)
    for _ in range(8):
        inst = adversarial_instance(sp, rng)
        tr = proof_trace(inst["E"], inst["eps"], inst["nu"], 2, 2, 2, omega=inst["omega"], forced_degree=True)
        assert not tr.completed
        assert tr.terminated_at in (3, 4, 5) and tr.failure


def test_trace_rejects_points_outside_space():
    with pytest.raises(DomainError):
        proof_trace([(0, 7)], 1, 1, 2, 2, 2)


def test_trace_greedy_set_with_explicit_witness_lines():
    sp = rspace(2, 2, 2)
    E = greedy_small_kakeya(2, 2, 2, seed=0)
    tr = proof_trace(E, 1, Fraction(3, 4), 2, 2, 2)
    assert tr.terminated_at == 1 and len(E) >= tr.bound
