"""Vanishing polynomials: a kernel vector of the evaluation matrix.

Over F_q the elimination is exact.  Over L_N it uses full pivoting on the
entry of least valuation.  Every entry left of a pivot in its row then has
valuation at least the pivot's, so back-substitution stays in O_L and the
free variable (set to 1) gives a unit coefficient.  Precision lost to the
divisions is tracked by the ExtElem arithmetic and checked at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Sequence

from ..errors import ConsistencyError, DomainError, PrecisionError, PreconditionError
from ..galois import FqElem
from ..lubin_tate import ExtElem
from .multipoly import CoeffRing, ExtCoeffs, FqCoeffs, MultiPoly, monomial_basis, ring_of


@dataclass
class SolveInfo:
    basis: list[tuple[int, ...]]
    rank: int
    free_column: int
    pivots: list[tuple[int, int, int]] = dc_field(default_factory=list)  # (row, col, valuation)
    residual_precision: int | None = None  # g(s) known to vanish mod pi^this, over L_N
    coefficient_precision: int | None = None
    normalization_shift: int = 0


def _monomial_values(point: Sequence, basis, one):
    n = len(point)
    top = max((max(e) for e in basis), default=0)
    pw = []
    for i in range(n):
        row = [one]
        for _ in range(top):
            row.append(row[-1] * point[i])
        pw.append(row)
    out = []
    for e in basis:
        v = one
        for i, m in enumerate(e):
            if m:
                v = v * pw[i][m]
        out.append(v)
    return out


def _check_size(S, n: int, d: int):
    if len(S) >= comb(n + d, n):
        raise PreconditionError(f"|S| = {len(S)} >= C(n+d, n) = {comb(n + d, n)}; no kernel is guaranteed")


def _solve_fq(S, n: int, d: int, ring: FqCoeffs) -> tuple[MultiPoly, SolveInfo]:
    F = ring.F
    basis = monomial_basis(n, d)
    M = len(basis)
    rows = [[c.value for c in _monomial_values(s, basis, ring.one())] for s in S]
    pivots = []
    r = 0
    for col in range(M):
        piv = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][col])
        rows[r] = [F.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                c = rows[i][col]
                rows[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append((r, col, 0))
        r += 1
    pivot_cols = {c for _, c, _ in pivots}
    free = next(c for c in range(M) if c not in pivot_cols)
    x = [0] * M
    x[free] = 1
    for row, col, _ in pivots:
        x[col] = F.neg(rows[row][free])
    g = MultiPoly(n, ring, {basis[j]: FqElem(F, x[j]) for j in range(M)})
    for s in S:
        if not g(s).is_zero():
            raise ConsistencyError("kernel vector does not vanish on S")
    return g, SolveInfo(basis, len(pivots), free, pivots)


def _solve_ext(S, n: int, d: int, ring: ExtCoeffs) -> tuple[MultiPoly, SolveInfo]:
    L = ring.L
    basis = monomial_basis(n, d)
    M = len(basis)
    A = [_monomial_values(s, basis, L.one()) for s in S]
    nrows = len(A)
    row_free = list(range(nrows))
    col_free = list(range(M))
    order = []  # (row, col, valuation) in elimination order
    while row_free and col_free:
        best = None
        for j in col_free:
            for i in row_free:
                a = A[i][j]
                if a.is_zero():
                    continue
                v = a.valuation()
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            break
        v, pr, pc = best
        p = A[pr][pc]
        row_free.remove(pr)
        col_free.remove(pc)
        for i in row_free:
            a = A[i][pc]
            if a.is_zero():
                continue
            factor = a / p
            A[i] = [x - factor * y for x, y in zip(A[i], A[pr])]
        order.append((pr, pc, v))
    free = min(col_free)
    x: list[ExtElem | None] = [None] * M
    for j in col_free:
        x[j] = L.one() if j == free else L.zero()
    for pr, pc, v in reversed(order):
        acc = L.zero()
        for j in range(M):
            if j != pc and x[j] is not None and not A[pr][j].is_zero():
                acc = acc + A[pr][j] * x[j]
        if acc.is_zero():
            x[pc] = ExtElem(L, [[0] * L.N for _ in range(L.e)], max(acc.prec - v, 0))
        else:
            x[pc] = -(acc / A[pr][pc])
    coeff_prec = min(c.prec for c in x)
    if all(c.is_zero() for c in x):
        raise PrecisionError("kernel vector vanishes to working precision")
    if coeff_prec < 1:
        raise PrecisionError(f"kernel coefficients known only mod pi^{coeff_prec}; residues undetermined")
    shift = min(c.valuation() for c in x if not c.is_zero())
    if shift:
        x = [c.div_pi_power(shift) for c in x]
    g = MultiPoly(n, ring, {basis[j]: x[j] for j in range(M)})
    residual = L.horizon
    for s in S:
        val = g(s)
        if not val.is_zero():
            raise PrecisionError(f"g(s) = {val.format()} is nonzero to working precision")
        residual = min(residual, val.prec)
    info = SolveInfo(basis, len(order), free, order, residual, min(c.prec for c in x), shift)
    return g, info


def solve_vanishing(S: Sequence[Sequence], d: int, ring: CoeffRing | None = None, n: int | None = None):
    """``(g, SolveInfo)`` for a nonzero g of degree <= d vanishing on S."""
    S = [tuple(s) for s in S]
    if ring is None:
        if not S:
            raise DomainError("empty S needs an explicit coefficient ring")
        ring = ring_of(S[0][0])
    if n is None:
        if not S:
            raise DomainError("empty S needs an explicit n")
        n = len(S[0])
    if any(len(s) != n for s in S):
        raise DomainError("points of different dimensions")
    _check_size(S, n, d)
    if isinstance(ring, FqCoeffs):
        return _solve_fq(S, n, d, ring)
    if isinstance(ring, ExtCoeffs):
        return _solve_ext(S, n, d, ring)
    raise DomainError(f"vanishing polynomials over {ring.name} are not supported")


def vanishing_polynomial(S: Sequence[Sequence], d: int, ring: CoeffRing | None = None, n: int | None = None) -> MultiPoly:
    """Nonzero g of total degree <= d with g(s) = 0 for s in S.

    Over L_N the coefficients lie in O_L and at least one is a unit.
    """
    return solve_vanishing(S, d, ring, n)[0]
