import pytest
from hypothesis import given, strategies as st

from kakeya_lab.errors import DomainError, PrecisionError, ResourceError
from kakeya_lab.galois import field
from kakeya_lab.laurent import (RVector, TruncSeries, count_primitive, enumerate_R, quotient_ring)

F2 = field(2)


def test_series_examples():
    a = TruncSeries(F2, [1, 1], 4)
    assert a * a == TruncSeries(F2, [1, 0, 1, 0], 4)
    assert a.inverse() == TruncSeries(F2, [1, 1, 1, 1], 4)
    assert TruncSeries(F2, [0, 0, 1, 0, 0, 1]).valuation() == 2


def test_inverse_of_zero_is_precision_error():
    z = TruncSeries(F2, [0, 0, 0], 3)
    with pytest.raises(PrecisionError):
        z.inverse()
    with pytest.raises(PrecisionError):
        z.valuation()


def test_laurent_shift_and_inverse():
    x = TruncSeries(F2, [1, 1], 5, shift=2)  # t^2 + t^3
    y = x.inverse()
    assert y.valuation() == -2
    one = x * y
    assert one.coeff(0) == 1 and all(one.coeff(i) == 0 for i in range(1, one.prec))


def test_format_and_parse_roundtrip():
    F3 = field(3)
    a = TruncSeries(F3, [2, 0, 1, 1], 5)
    assert a.format() == "2 + t^2 + t^3 (mod t^5)"
    assert TruncSeries.parse(F3, a.format()) == a
    assert TruncSeries.parse(F3, a.digits()) == a


def test_enumerate_examples():
    assert list(enumerate_R(1, 2, 2, primitive_only=True)) == [(0, 1), (1, 0), (1, 1)]
    assert sum(1 for _ in enumerate_R(2, 2, 2, primitive_only=True)) == 12 == count_primitive(2, 2, 2)
    assert list(enumerate_R(1, 1, 2)) == [(0,), (1,)]


def test_enumeration_budget():
    with pytest.raises(ResourceError):
        next(enumerate_R(3, 3, 3, budget=100))


@pytest.mark.parametrize("q,k", [(q, k) for q in (2, 3) for k in (1, 2, 3)])
def test_unit_group_size(q, k):
    R = quotient_ring(q, k)
    assert len(R.units) == q**k - q ** (k - 1)
    for u in R.units:
        assert R.mul(u, R.inv(u)) == 1


@pytest.mark.parametrize("q,k,n", [(2, 1, 3), (2, 3, 2), (3, 2, 2)])
def test_primitive_count_matches_enumeration(q, k, n):
    assert sum(1 for _ in enumerate_R(k, n, q, primitive_only=True)) == count_primitive(k, n, q)


def test_nonunit_inverse_and_bad_digits():
    R = quotient_ring(2, 2)
    with pytest.raises(DomainError):
        R.inv(2)
    with pytest.raises(DomainError):
        R.parse_digits("12")
    with pytest.raises(DomainError):
        R.digits(4)


def test_rvector_ops():
    R = quotient_ring(2, 2)
    v = RVector(R, (1, 2))
    w = RVector(R, (2, 2))
    assert v.is_primitive() and not w.is_primitive()
    assert (v + w).coords == (3, 0)
    assert v.scale(2).coords == (2, 0)
    assert v.format() == "10,01"


def series(q, prec):
    return st.lists(st.integers(0, q - 1), min_size=prec, max_size=prec).map(
        lambda c: TruncSeries(field(q), c, prec))


@given(st.sampled_from([2, 3]).flatmap(lambda q: st.tuples(series(q, 6), series(q, 6))))
def test_ultrametric(pair):
    a, b = pair
    if a.is_zero() or b.is_zero() or (a + b).is_zero():
        return
    s = (a + b).abs_value()
    assert s <= max(a.abs_value(), b.abs_value())
    if a.abs_value() != b.abs_value():
        assert s == max(a.abs_value(), b.abs_value())


@given(st.sampled_from([(2, 3), (3, 2), (2, 2)]).flatmap(
    lambda qk: st.tuples(st.just(qk), series(qk[0], 6), series(qk[0], 6))))
def test_projection_is_ring_homomorphism(args):
    (q, k), a, b = args
    R = quotient_ring(q, k)
    assert (a + b).project(R) == R.add(a.project(R), b.project(R))
    assert (a * b).project(R) == R.mul(a.project(R), b.project(R))


@given(st.sampled_from([2, 3]).flatmap(lambda q: series(q, 7)))
def test_inverse_roundtrip(a):
    if a.is_zero() or a.valuation() != 0:
        return
    prod = a * a.inverse()
    assert prod == TruncSeries.one(a.F, prod.prec)
