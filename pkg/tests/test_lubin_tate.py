from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kakeya_lab.checks import lt_selftest
from kakeya_lab.errors import DomainError
from kakeya_lab.galois import FqPoly, field
from kakeya_lab.laurent import TruncSeries, quotient_ring
from kakeya_lab.lubin_tate import (TPoly, apply_f, bracket_poly, bracket_series, build_extension,
                                   eisenstein_factor, iterate_f, lubin_tate_f, module_action, newton_check,
                                   order_of, s_map)


def tp(q, terms):
    """TPoly from {X-exponent: t-coefficient list}."""
    F = field(q)
    return TPoly(F, {e: FqPoly(F, c) for e, c in terms.items()})


def test_iterate_examples():
    assert iterate_f(2, 1) == tp(2, {1: [0, 1], 2: [1]})
    assert iterate_f(3, 1) == tp(3, {1: [0, 1], 3: [1]})
    assert iterate_f(2, 2) == tp(2, {1: [0, 0, 1], 2: [0, 1, 1], 4: [1]})
    # t^2 X + (t + t^3) X^3 + X^9 for q = 3
    assert iterate_f(3, 2) == tp(3, {1: [0, 0, 1], 3: [0, 1, 0, 1], 9: [1]})


@pytest.mark.parametrize("q,k", [(2, 3), (3, 2), (4, 2)])
def test_iterate_shape(q, k):
    P = iterate_f(q, k)
    assert P.degree == q**k and P.coeff(q**k) == FqPoly(field(q), [1])
    assert P.coeff(0).is_zero() and P.is_additive()
    assert P == lubin_tate_f(q).compose(iterate_f(q, k - 1))


def test_bracket_series_examples():
    F2 = field(2)
    assert bracket_series(TruncSeries(F2, [0, 1], 6), terms=3).truncate_t(6) == tp(2, {1: [0, 1], 2: [1]})
    F3 = field(3)
    assert bracket_series(TruncSeries(F3, [2], 6), terms=3) == tp(3, {1: [2]})
    s = bracket_series(TruncSeries(F2, [1, 1], 6), terms=3)
    assert s.coeff(1) == FqPoly(F2, [1, 1]) and s.coeff(2) == FqPoly(F2, [1])


def test_bracket_poly_examples():
    R = quotient_ring(2, 2)
    assert bracket_poly(R, 1) == tp(2, {1: [1]})
    assert bracket_poly(R, 2) == lubin_tate_f(2)
    assert bracket_poly(R, 3) == tp(2, {1: [1, 1], 2: [1]})
    assert bracket_poly(R, 0).is_zero()


def test_s_map_examples():
    R = quotient_ring(2, 2)
    F = field(2)
    assert s_map(R, 3) == FqPoly(F, [0, 1, 1])
    assert s_map(R, 0).is_zero()
    assert s_map(R, 2) == FqPoly(F, [0, 0, 1])
    for q, k in [(2, 3), (3, 2)]:
        Rk = quotient_ring(q, k)
        for a in Rk.elements():
            if a:
                assert s_map(Rk, a).valuation() == q ** Rk.valuation(a)


def test_g_examples():
    assert eisenstein_factor(2, 1) == tp(2, {0: [0, 1], 1: [1]})
    assert eisenstein_factor(3, 1) == tp(3, {0: [0, 1], 2: [1]})
    # g_2 for q = 2 is t + t X + X^2, and g_2 * f = f o f
    g2 = eisenstein_factor(2, 2)
    assert g2 == tp(2, {0: [0, 1], 1: [0, 1], 2: [1]})
    assert g2 * lubin_tate_f(2) == iterate_f(2, 2)


def test_newton_examples():
    assert newton_check(eisenstein_factor(2, 1)) == 1
    assert newton_check(eisenstein_factor(3, 1)) == Fraction(1, 2)
    assert newton_check(eisenstein_factor(2, 2)) == Fraction(1, 2)


@pytest.mark.parametrize("q,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)])
def test_eisenstein_shape(q, k):
    g = eisenstein_factor(q, k)
    e = q ** (k - 1) * (q - 1)
    assert g.degree == e
    assert g.coeff(e) == FqPoly(field(q), [1])
    assert g.coeff(0).valuation() == 1
    assert all(g.coeff(j).valuation() >= 1 for j in range(1, e))
    # g_k * f^{k-1} == f^k exactly
    prev = iterate_f(q, k - 1) if k > 1 else tp(q, {1: [1]})
    assert g * prev == iterate_f(q, k)


def test_extension_examples():
    L = build_extension(2, 2)
    F = field(2)
    assert L.zeta1.valuation() == 1
    assert L.scalar(FqPoly(F, [0, 1])).valuation() == L.e == 2
    assert (L.one() + L.zeta1).residue().value == 1
    assert L.zeta1.residue().value == 0
    L1 = build_extension(2, 1)
    # for q = 2, k = 1 the extension is K itself and zeta_1 = t
    assert L1.e == 1 and L1.zeta1 == L1.scalar(FqPoly(F, [0, 1]))
    assert module_action(1, L1.zeta1) == L1.zeta1
    assert apply_f(L1.zeta1).is_zero()


def test_module_action_examples():
    for q, k in [(2, 2), (3, 2), (2, 3)]:
        L = build_extension(q, k)
        assert module_action(0, L.zeta1).is_zero()
        assert order_of(L.zeta1) == k
    L = build_extension(2, 2)
    with pytest.raises(DomainError):
        module_action(1, L.one())
    with pytest.raises(DomainError):
        order_of(L.one())


@pytest.mark.parametrize("q,k", [(2, 2), (3, 1), (2, 3)])
def test_bracket_additive_and_multiplicative(q, k):
    R = quotient_ring(q, k)
    N = k + 2
    z = build_extension(q, k).zeta1
    for a in R.elements():
        Pa = bracket_poly(R, a)
        for b in R.elements():
            Pb = bracket_poly(R, b)
            assert (Pa + Pb) == bracket_poly(R, R.add(a, b))
            lhs = Pa.compose(Pb).truncate_t(N)
            rhs = bracket_poly(R, R.mul(a, b)).truncate_t(N)
            # [ab] agrees with [a] o [b] modulo f^k, i.e. on Lambda_k
            assert lhs.evaluate(z) == rhs.evaluate(z)


def ext_elems(q, k):
    L = build_extension(q, k)
    digit = st.integers(0, q - 1)
    rows = st.lists(st.lists(digit, min_size=L.N, max_size=L.N), min_size=L.e, max_size=L.e)
    return rows.map(lambda r: L._from_raw(r))


def closed_form_valuation(x):
    L = x.L
    vals = [L.e * j + i for i, r in enumerate(x.rows) for j, c in enumerate(r) if c]
    return min(vals) if vals else None


@given(st.sampled_from([(2, 2), (3, 2), (2, 3)]).flatmap(lambda qk: st.tuples(ext_elems(*qk), ext_elems(*qk))))
def test_valuation_laws(pair):
    x, y = pair
    L = x.L
    if x.is_zero() or y.is_zero():
        return
    assert x.valuation() == closed_form_valuation(x)
    vx, vy = x.valuation(), y.valuation()
    if vx + vy < L.horizon:
        assert (x * y).valuation() == vx + vy
    s = x + y
    if not s.is_zero():
        assert s.valuation() >= min(vx, vy)


@given(st.sampled_from([(2, 2), (3, 1)]).flatmap(lambda qk: ext_elems(*qk)))
def test_unit_inverse(x):
    if x.is_zero() or x.valuation() != 0:
        return
    assert x * x.inverse() == x.L.one()


@pytest.mark.parametrize("q,k", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_selftest_passes(q, k):
    rep = lt_selftest(q, k)
    assert rep.passed, [c.to_json() for c in rep.checks if not c.passed]
