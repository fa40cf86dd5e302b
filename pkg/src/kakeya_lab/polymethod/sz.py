"""Discrete-valuation Schwartz-Zippel counting over C = {s_a : a in A_k}.

For f in B[z_1..z_n] with lex-leading term c_alpha z^alpha the count is

    #{y in C^n : v_X(f(y)) >= v_X(c_alpha) + theta n q^k}

and the bound is max{q^{nk}, |alpha| k q^{k(n-1)+1} / theta}.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from math import ceil
from typing import Iterable, Sequence

import numpy as np

from ..errors import DomainError, PreconditionError
from ..galois import INF, FqElem, FqPoly, field
from ..laurent import quotient_ring
from ..lubin_tate import s_map
from ..rng import make_rng
from .multipoly import BCoeffs, FqCoeffs, MultiPoly, lift_to_B


def _as_B(f: MultiPoly) -> MultiPoly:
    if isinstance(f.ring, FqCoeffs):
        return lift_to_B(f)
    if not isinstance(f.ring, BCoeffs):
        raise DomainError("Schwartz-Zippel counting needs coefficients in F_q or B")
    return f


def _theta(theta) -> Fraction:
    th = Fraction(theta).limit_denominator(10**9) if isinstance(theta, float) else Fraction(theta)
    if not 0 < th <= 1:
        raise PreconditionError(f"theta must lie in (0, 1], got {theta}")
    return th


def C_points(q: int, k: int) -> list[FqPoly]:
    """``[s_a for a in R]`` indexed by R-code."""
    ring = quotient_ring(q, k)
    return [s_map(ring, a) for a in ring.elements()]


def sz_threshold(f: MultiPoly, theta, k: int) -> Fraction:
    f = _as_B(f)
    q = f.ring.F.q
    return Fraction(f.leading_coeff.valuation()) + _theta(theta) * f.n * q**k


def _check_pre(f: MultiPoly, k: int):
    if f.is_zero():
        raise PreconditionError("f must be nonzero")
    q = f.ring.F.q
    alpha = f.leading_exponent
    if any(a >= q**k for a in alpha):
        raise PreconditionError(f"leading exponent {alpha} has a component >= q^k = {q**k}")


def _count_exact(f: MultiPoly, T: int, k: int) -> int:
    C = C_points(f.ring.F.q, k)
    count = 0
    for y in product(C, repeat=f.n):
        if f(y).valuation() >= T:
            count += 1
    return count


def _count_fast(f: MultiPoly, T: int, k: int) -> int:
    """Vectorized count for prime q: every f(y) is computed mod X^T at once."""
    F = f.ring.F
    p, n = F.p, f.n
    C = C_points(F.q, k)
    Q = len(C)
    maxdeg = [f.degree_in(i) for i in range(n)]
    top = max(maxdeg)
    # powers[a, j] = s_a^j mod X^T
    powers = np.zeros((Q, top + 1, T), dtype=np.int64)
    for a, s in enumerate(C):
        cur = FqPoly(F, [1])
        for j in range(top + 1):
            c = cur.coeffs[:T]
            powers[a, j, : len(c)] = c
            cur = (cur * s).truncate(T)
    # Toeplitz matrices for multiplication mod X^T
    r_idx, c_idx = np.indices((T, T))
    diff = r_idx - c_idx
    lower = diff >= 0
    toeplitz_cache: dict[int, np.ndarray] = {}

    def toeplitz(j):
        if j not in toeplitz_cache:
            m = powers[:, j, :][:, np.where(lower, diff, 0)]
            toeplitz_cache[j] = np.where(lower[None], m, 0)
        return toeplitz_cache[j]

    total = np.zeros((Q,) * n + (T,), dtype=np.int64)
    for alpha, c in f.terms.items():
        vec = np.zeros(T, dtype=np.int64)
        cc = c.coeffs[:T]
        vec[: len(cc)] = cc
        V = vec
        for i in range(n):
            # V has shape (Q,)*i + (T,); multiply by s_{y_i}^{alpha_i}
            V = np.einsum("...c,yrc->...yr", V, toeplitz(alpha[i])) % p
        total = (total + V) % p
    return int(np.count_nonzero(~total.any(axis=-1)))


def sz_count(f: MultiPoly, theta, k: int, method: str = "auto") -> int:
    """Exact number of y in C^n with v_X(f(y)) >= v_X(c_alpha) + theta n q^k."""
    f = _as_B(f)
    _check_pre(f, k)
    T = ceil(sz_threshold(f, theta, k))
    if T <= 0:
        return len(C_points(f.ring.F.q, k)) ** f.n
    if method == "auto":
        method = "fast" if f.ring.F.m == 1 else "exact"
    if method == "fast":
        if f.ring.F.m != 1:
            raise DomainError("the vectorized count needs a prime field")
        return _count_fast(f, T, k)
    if method == "exact":
        return _count_exact(f, T, k)
    raise DomainError(f"unknown method {method!r}")


def sz_bound(alpha: Sequence[int], theta, k: int, n: int, q: int) -> Fraction:
    """max{q^{nk}, |alpha| k q^{k(n-1)+1} / theta}, exact."""
    th = _theta(theta)
    return max(Fraction(q ** (n * k)), sum(alpha) * k * Fraction(q ** (k * (n - 1) + 1)) / th)


def _num(x: Fraction):
    return x.numerator if x.denominator == 1 else str(x)


@dataclass
class SZReport:
    f: str
    q: int
    k: int
    n: int
    alpha: tuple[int, ...]
    theta: Fraction
    threshold: Fraction
    count: int
    bound: Fraction

    @property
    def passed(self) -> bool:
        return self.count < self.bound

    @property
    def status(self) -> str:
        return "pass" if self.passed else "LEMMA VIOLATION"

    def to_json(self) -> dict:
        return {
            "f": self.f, "q": self.q, "k": self.k, "n": self.n, "alpha": list(self.alpha),
            "theta": _num(self.theta), "threshold": _num(self.threshold),
            "count": self.count, "bound": _num(self.bound), "status": self.status,
        }


def sz_verify(f: MultiPoly, theta, k: int, method: str = "auto") -> SZReport:
    f = _as_B(f)
    q = f.ring.F.q
    count = sz_count(f, theta, k, method)
    alpha = f.leading_exponent
    return SZReport(f.format(), q, k, f.n, alpha, _theta(theta), sz_threshold(f, theta, k),
                    count, sz_bound(alpha, theta, k, f.n, q))


# --- sweeps ------------------------------------------------------------------------


@dataclass
class SweepResult:
    cases: int = 0
    violations: list[dict] = dc_field(default_factory=list)
    max_count_ratio: float = 0.0  # max count / bound seen

    def add(self, rep: SZReport):
        self.cases += 1
        self.max_count_ratio = max(self.max_count_ratio, rep.count / float(rep.bound))
        if not rep.passed:
            self.violations.append(rep.to_json())

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"cases": self.cases, "violations": self.violations,
                "max_count_over_bound": self.max_count_ratio, "status": "pass" if self.passed else "LEMMA VIOLATION"}


def exhaustive_polys(q: int, n: int, max_deg: int, coeff_deg: int) -> Iterable[MultiPoly]:
    """Every nonzero f with each z-exponent <= max_deg and coefficient X-degree <= coeff_deg."""
    F = field(q)
    ring = BCoeffs(F)
    coeffs = [FqPoly(F, ds) for ds in product(range(q), repeat=coeff_deg + 1)]
    monos = list(product(range(max_deg + 1), repeat=n))
    for choice in product(range(len(coeffs)), repeat=len(monos)):
        if any(choice):
            yield MultiPoly(n, ring, {m: coeffs[c] for m, c in zip(monos, choice)})


def exhaustive_sweep(q: int = 2, k: int = 2, n: int = 1, max_deg: int = 3, coeff_deg: int = 2,
                     thetas: Sequence = (Fraction(1, 2), Fraction(1))) -> SweepResult:
    res = SweepResult()
    for f in exhaustive_polys(q, n, max_deg, coeff_deg):
        for th in thetas:
            res.add(sz_verify(f, th, k))
    return res


def random_poly(q: int, k: int, n: int, rng: np.random.Generator, max_deg: int | None = None,
                coeff_deg: int = 3) -> MultiPoly:
    """Random f in B[z] with leading exponents below q^k.

    Half the draws are products of linear factors (z_i - s_u), which put many
    roots on C^n and push counts toward the bound; the rest are sparse.
    """
    F = field(q)
    ring = BCoeffs(F)
    Q = q**k
    max_deg = min(Q - 1, 4) if max_deg is None else max_deg
    C = C_points(q, k)

    def rand_coeff():
        while True:
            c = FqPoly(F, [int(x) for x in rng.integers(0, q, size=int(rng.integers(1, coeff_deg + 2)))])
            if not c.is_zero():
                return c

    if rng.random() < 0.5:
        f = MultiPoly.constant(n, ring, FqPoly(F, [1]).shift(int(rng.integers(0, coeff_deg + 1))))
        for i in range(n):
            for u in rng.choice(Q, size=int(rng.integers(0, max_deg + 1)), replace=False):
                f = f * (MultiPoly.variable(n, ring, i) - MultiPoly.constant(n, ring, C[int(u)]))
        if rng.random() < 0.5:
            e = tuple(int(x) for x in rng.integers(0, max_deg + 1, size=n))
            g = MultiPoly(n, ring, {e: rand_coeff()})
            if max(g.leading_exponent) < Q and (f + g).terms and max((f + g).leading_exponent) < Q:
                f = f + g
        if not f.is_zero():
            return f
    terms = {}
    for _ in range(int(rng.integers(1, 5))):
        e = tuple(int(x) for x in rng.integers(0, max_deg + 1, size=n))
        terms[e] = rand_coeff()
    return MultiPoly(n, ring, terms)


def random_sweep(q: int, k: int, n: int, count: int, seed=0, thetas=None) -> SweepResult:
    rng = make_rng(seed)
    res = SweepResult()
    for _ in range(count):
        f = random_poly(q, k, n, rng)
        if thetas is None:
            th = Fraction(int(rng.integers(1, 9)), 8)
        else:
            th = Fraction(thetas[int(rng.integers(len(thetas)))])
        res.add(sz_verify(f, th, k))
    return res


# --- Lagrange interpolation over F_q(X) --------------------------------------------


class RatFunc:
    """num/den in F_q(X), reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: FqPoly, den: FqPoly | None = None):
        F = num.F
        den = FqPoly(F, [1]) if den is None else den
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = num.gcd(den) if not num.is_zero() else den
        num, den = num // g, den // g
        lc = F.inv(den.leading())
        self.num, self.den = num.scale(lc), den.scale(lc)

    @classmethod
    def lift(cls, x) -> "RatFunc":
        return x if isinstance(x, RatFunc) else cls(x)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, o):
        o = RatFunc.lift(o)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, o):
        return self + (-RatFunc.lift(o))

    def __mul__(self, o):
        o = RatFunc.lift(o)
        return RatFunc(self.num * o.num, self.den * o.den)

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num)

    def __truediv__(self, o):
        return self * RatFunc.lift(o).inverse()

    def valuation(self):
        return INF if self.num.is_zero() else self.num.valuation() - self.den.valuation()

    def __eq__(self, o):
        o = RatFunc.lift(o)
        return self.num == o.num and self.den == o.den

    def format(self) -> str:
        if self.den.degree == 0:
            return self.num.format()
        return f"({self.num.format()})/({self.den.format()})"

    def __repr__(self):
        return f"RatFunc({self.format()})"


def lagrange_interpolate(points: Sequence[tuple]) -> list[RatFunc]:
    """Coefficients (low degree first) of the interpolant through ``(node, value)`` pairs.

    Nodes and values are elements of B or F_q(X); nodes must be distinct.
    """
    if not points:
        raise DomainError("no interpolation points")
    nodes = [RatFunc.lift(x) for x, _ in points]
    vals = [RatFunc.lift(y) for _, y in points]
    F = nodes[0].num.F
    for i in range(len(nodes)):
        for j in range(i):
            if nodes[i] == nodes[j]:
                raise DomainError("repeated interpolation node")
    zero = RatFunc(FqPoly(F))
    m = len(nodes)
    out = [zero] * m
    for i, (xi, yi) in enumerate(zip(nodes, vals)):
        basis = [RatFunc(FqPoly(F, [1]))]  # prod_{j != i} (z - x_j), low degree first
        denom = RatFunc(FqPoly(F, [1]))
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            basis = [zero - xj * basis[0]] + [basis[r - 1] - xj * basis[r] for r in range(1, len(basis))] + [basis[-1]]
            denom = denom * (xi - xj)
        scale = yi / denom
        out = [o + scale * b for o, b in zip(out, basis)]
    while len(out) > 1 and out[-1].is_zero():
        out.pop()
    return out


def lagrange_check(points: Sequence[tuple]) -> list[RatFunc]:
    """Interpolating polynomial (test oracle for the degree-alpha coefficient identity)."""
    return lagrange_interpolate(points)


def leading_identity(f_coeffs: Sequence, nodes: Sequence) -> tuple[RatFunc, RatFunc]:
    """``(sum_u f(s_u) / prod_{w != u}(s_u - s_w), c_alpha)`` for univariate f over B.

    ``f_coeffs`` is low degree first with ``len(nodes) == deg f + 1``.
    """
    f_coeffs = [RatFunc.lift(c) for c in f_coeffs]
    if len(nodes) != len(f_coeffs):
        raise DomainError("need deg f + 1 nodes")

    def ev(x):
        acc = RatFunc.lift(f_coeffs[-1])
        for c in reversed(f_coeffs[:-1]):
            acc = acc * x + c
        return acc

    nodes = [RatFunc.lift(x) for x in nodes]
    F = nodes[0].num.F
    total = RatFunc(FqPoly(F))
    for i, u in enumerate(nodes):
        d = RatFunc(FqPoly(F, [1]))
        for j, w in enumerate(nodes):
            if j != i:
                d = d * (u - w)
        total = total + ev(u) / d
    return total, f_coeffs[-1]


def as_fq_poly(f: MultiPoly) -> MultiPoly:
    """Drop a B-polynomial with constant coefficients back to F_q."""
    F = f.ring.F
    if any(c.degree > 0 for c in f.terms.values()):
        raise DomainError("coefficients are not constants")
    return f.map_coeffs(lambda c: FqElem(F, c.coeffs[0]), FqCoeffs(F))
