"""Residue reduction O_L -> F_q and restriction of g to a Lubin-Tate line."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import DomainError, PrecisionError
from ..galois import FqPoly
from ..lubin_tate import ExtElem, ExtField, TPoly
from .multipoly import ExtCoeffs, FqCoeffs, MultiPoly


def residue_reduce(g: MultiPoly) -> MultiPoly:
    """Coefficientwise image of g in F_q[z]."""
    if not isinstance(g.ring, ExtCoeffs):
        raise DomainError("residue_reduce expects coefficients in O_L")
    L = g.ring.L
    for c in g.terms.values():
        if c.prec < 1:
            raise PrecisionError("coefficient residue unknown (precision below 1)")
    return g.map_coeffs(lambda c: c.residue(), FqCoeffs(L.F))


@dataclass
class ExtUniPoly:
    """Univariate polynomial over O_L / pi^{eN}, low degree first."""

    L: ExtField
    coeffs: list[ExtElem]

    def __post_init__(self):
        while self.coeffs and self.coeffs[-1].is_zero():
            self.coeffs.pop()

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other: "ExtUniPoly") -> "ExtUniPoly":
        a, b = self.coeffs, other.coeffs
        m = max(len(a), len(b))
        z = self.L.zero()
        return ExtUniPoly(self.L, [(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(m)])

    def __mul__(self, other) -> "ExtUniPoly":
        if isinstance(other, ExtElem):
            return ExtUniPoly(self.L, [c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ExtUniPoly(self.L, [])
        out = [self.L.zero() for _ in range(len(a) + len(b) - 1)]
        for i, x in enumerate(a):
            if x.is_zero():
                continue
            for j, y in enumerate(b):
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y
        return ExtUniPoly(self.L, out)

    def __call__(self, x: ExtElem) -> ExtElem:
        acc = self.L.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def residue(self) -> FqPoly:
        return FqPoly(self.L.F, [c.residue().value for c in self.coeffs])

    @property
    def precision(self) -> int:
        return min((c.prec for c in self.coeffs), default=self.L.horizon)

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]


def _tpoly_to_ext(L: ExtField, P: TPoly) -> list[ExtElem]:
    deg = P.degree
    return [L.scalar(P.coeff(i)) for i in range(deg + 1)] if deg >= 0 else []


def compose_line(g: MultiPoly, c_w: Sequence[ExtElem], P_w: Sequence[TPoly]) -> ExtUniPoly:
    """h(X) = g(c_1 + P_1(X), ..., c_n + P_n(X)) over L_N."""
    if not isinstance(g.ring, ExtCoeffs):
        raise DomainError("compose_line expects g over O_L")
    L = g.ring.L
    if len(c_w) != g.n or len(P_w) != g.n:
        raise DomainError("need one base point and one polynomial per variable")
    for c in c_w:
        if not c.is_zero() and c.valuation() < 1:
            raise DomainError("base point coordinates must lie in m_L")
    lines = []
    for c, P in zip(c_w, P_w):
        coeffs = _tpoly_to_ext(L, P) or [L.zero()]
        coeffs[0] = coeffs[0] + c
        lines.append(ExtUniPoly(L, coeffs))
    powers = []
    for i in range(g.n):
        row = [ExtUniPoly(L, [L.one()])]
        for _ in range(g.degree_in(i)):
            row.append(row[-1] * lines[i])
        powers.append(row)
    h = ExtUniPoly(L, [])
    for e, c in g.terms.items():
        term = ExtUniPoly(L, [c])
        for i, m in enumerate(e):
            if m:
                term = term * powers[i][m]
        h = h + term
    return h


def residue_on_C(gbar: MultiPoly, s: Sequence[FqPoly]) -> FqPoly:
    """gbar(s_1, ..., s_n) in F_q[X] for gbar over F_q."""
    F = gbar.ring.F
    if not gbar.terms:
        return FqPoly(F)
    acc = FqPoly(F)
    for e, c in gbar.terms.items():
        term = FqPoly(F, [c.value])
        for i, m in enumerate(e):
            if m:
                term = term * s[i] ** m
        acc = acc + term
    return acc

