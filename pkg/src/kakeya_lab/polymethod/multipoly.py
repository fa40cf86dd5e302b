"""Sparse multivariate polynomials over F_q, B = F_q[X] or the extension L_N."""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Mapping, Sequence

from ..errors import DomainError
from ..galois import GF, FqElem, FqPoly, field
from ..lubin_tate import ExtElem, ExtField, build_extension

Exponent = tuple[int, ...]


class CoeffRing:
    """Adapter giving MultiPoly a zero, a one and text/JSON formats."""

    name = "?"

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def format(self, c) -> str:
        raise NotImplementedError

    def to_json(self, c):
        raise NotImplementedError

    def from_json(self, data):
        raise NotImplementedError

    def header(self) -> dict:
        raise NotImplementedError


class FqCoeffs(CoeffRing):
    name = "Fq"

    def __init__(self, F: GF):
        self.F = F

    def zero(self):
        return FqElem(self.F, 0)

    def one(self):
        return FqElem(self.F, 1)

    def format(self, c) -> str:
        return str(c.value)

    def to_json(self, c):
        return c.value

    def from_json(self, data):
        return FqElem(self.F, int(data))

    def header(self) -> dict:
        return {"ring": self.name, "q": self.F.q}

    def __eq__(self, other):
        return isinstance(other, FqCoeffs) and other.F is self.F

    def __hash__(self):
        return hash((self.name, self.F.q))


class BCoeffs(CoeffRing):
    """B = F_q[X]."""

    name = "B"

    def __init__(self, F: GF):
        self.F = F

    def zero(self):
        return FqPoly(self.F)

    def one(self):
        return FqPoly(self.F, [1])

    def format(self, c) -> str:
        return c.format("X")

    def to_json(self, c):
        return c.to_list()

    def from_json(self, data):
        return FqPoly(self.F, data)

    def header(self) -> dict:
        return {"ring": self.name, "q": self.F.q}

    def __eq__(self, other):
        return isinstance(other, BCoeffs) and other.F is self.F

    def __hash__(self):
        return hash((self.name, self.F.q))


class ExtCoeffs(CoeffRing):
    """O_L / pi^{eN}."""

    name = "L"

    def __init__(self, L: ExtField):
        self.L = L

    def zero(self):
        return self.L.zero()

    def one(self):
        return self.L.one()

    def format(self, c) -> str:
        # precision lives in the JSON form; the text form keeps only the digits
        return c.format().rsplit(" (mod", 1)[0]

    def to_json(self, c):
        return c.to_json()

    def from_json(self, data):
        return self.L.elem_from_json(data)

    def header(self) -> dict:
        return {"ring": self.name, "q": self.L.q, "k": self.L.k, "N": self.L.N}

    def __eq__(self, other):
        return isinstance(other, ExtCoeffs) and other.L is self.L

    def __hash__(self):
        return hash((self.name, self.L.q, self.L.k, self.L.N))


def ring_from_header(h: Mapping) -> CoeffRing:
    kind = h["ring"]
    if kind == "Fq":
        return FqCoeffs(field(int(h["q"])))
    if kind == "B":
        return BCoeffs(field(int(h["q"])))
    if kind == "L":
        return ExtCoeffs(build_extension(int(h["q"]), int(h["k"]), int(h["N"])))
    raise DomainError(f"unknown coefficient ring {kind!r}")


def ring_of(x) -> CoeffRing:
    """Coefficient ring matching a sample element."""
    if isinstance(x, FqElem):
        return FqCoeffs(x.F)
    if isinstance(x, FqPoly):
        return BCoeffs(x.F)
    if isinstance(x, ExtElem):
        return ExtCoeffs(x.L)
    raise DomainError(f"no coefficient ring for {type(x).__name__}")


def monomial_basis(n: int, d: int) -> list[Exponent]:
    """Exponents of total degree <= d in graded-lex order.

    Degrees increase; within a degree tuples go in descending lex order, so
    for n = 2, d = 2: 1, z1, z2, z1^2, z1 z2, z2^2.
    """
    if n < 1 or d < 0:
        raise DomainError("need n >= 1 and d >= 0")
    out: list[Exponent] = []
    for deg in range(d + 1):
        block = []
        for combo in combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            block.append(tuple(e))
        out.extend(sorted(block, reverse=True))
    assert len(out) == comb(n + d, n)
    return out


class MultiPoly:
    """``{exponent tuple: coefficient}`` with zero coefficients dropped."""

    __slots__ = ("n", "ring", "terms")

    def __init__(self, n: int, ring: CoeffRing, terms: Mapping[Exponent, object] | None = None):
        self.n = n
        self.ring = ring
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or min(e, default=0) < 0:
                raise DomainError(f"bad exponent {e} for {n} variables")
            if not c.is_zero():
                clean[e] = c
        self.terms = clean

    @classmethod
    def variable(cls, n: int, ring: CoeffRing, i: int) -> "MultiPoly":
        e = [0] * n
        e[i] = 1
        return cls(n, ring, {tuple(e): ring.one()})

    @classmethod
    def constant(cls, n: int, ring: CoeffRing, c) -> "MultiPoly":
        return cls(n, ring, {(0,) * n: c})

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    @property
    def leading_exponent(self) -> Exponent:
        if not self.terms:
            raise DomainError("zero polynomial has no leading term")
        return max(self.terms)

    @property
    def leading_coeff(self):
        return self.terms[self.leading_exponent]

    def coeff(self, e: Sequence[int]):
        return self.terms.get(tuple(e), self.ring.zero())

    def _check(self, other: "MultiPoly"):
        if other.n != self.n or other.ring != self.ring:
            raise DomainError("polynomials live in different rings")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return MultiPoly(self.n, self.ring, out)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.n, self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return MultiPoly(self.n, self.ring, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return MultiPoly(self.n, self.ring, out)

    def __pow__(self, m: int) -> "MultiPoly":
        r = MultiPoly.constant(self.n, self.ring, self.ring.one())
        for _ in range(m):
            r = r * self
        return r

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        if other.n != self.n or other.terms.keys() != self.terms.keys():
            return False
        return all(self.terms[e] == other.terms[e] for e in self.terms)

    def map_coeffs(self, fn, ring: CoeffRing) -> "MultiPoly":
        return MultiPoly(self.n, ring, {e: fn(c) for e, c in self.terms.items()})

    def __call__(self, point: Sequence):
        """Evaluate at a tuple of elements that multiply with the coefficients."""
        if len(point) != self.n:
            raise DomainError(f"expected {self.n} coordinates")
        if not self.terms:
            return self.ring.zero()
        powers: list[dict[int, object]] = [{} for _ in range(self.n)]

        def pw(i, m):
            cache = powers[i]
            if m not in cache:
                cache[m] = point[i] ** m if m else None
            return cache[m]

        acc = None
        for e in sorted(self.terms):
            term = self.terms[e]
            for i, m in enumerate(e):
                if m:
                    term = term * pw(i, m)
            acc = term if acc is None else acc + term
        return acc

    def format(self, var: str = "z") -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(f"{var}{i + 1}" + (f"^{m}" if m > 1 else "") for i, m in enumerate(e) if m)
            cs = self.ring.format(c)
            if not mono:
                parts.append(cs if " " not in cs else f"({cs})")
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}" if (" " in cs or "*" in cs) else f"{cs}*{mono}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            **self.ring.header(),
            "n": self.n,
            "text": self.format(),
            "terms": [[list(e), self.ring.to_json(self.terms[e])] for e in sorted(self.terms, reverse=True)],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MultiPoly":
        ring = ring_from_header(data)
        return cls(int(data["n"]), ring, {tuple(e): ring.from_json(c) for e, c in data["terms"]})

    def __repr__(self):
        return f"MultiPoly[{self.ring.name}]({self.format()})"


def lift_to_B(f: MultiPoly) -> MultiPoly:
    """View a polynomial over F_q as one over B = F_q[X]."""
    if not isinstance(f.ring, FqCoeffs):
        raise DomainError("lift_to_B expects F_q coefficients")
    F = f.ring.F
    return f.map_coeffs(lambda c: FqPoly(F, [c.value]), BCoeffs(F))


def from_exponents(n: int, ring: CoeffRing, items: Iterable[tuple[Exponent, object]]) -> MultiPoly:
    out: dict = {}
    for e, c in items:
        e = tuple(e)
        out[e] = out[e] + c if e in out else c
    return MultiPoly(n, ring, out)
