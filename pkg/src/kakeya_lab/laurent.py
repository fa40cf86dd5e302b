"""Truncated Laurent series over F_q and the quotient ring R = F_q[[t]]/(t^k).

Elements of R are coded as integers: ``a_0 + a_1 t + ... + a_{k-1} t^{k-1}``
has code ``sum(a_j * q**j)`` where each ``a_j`` is a field code.  This is the
canonical degree-``< k`` representative, so codes double as hash keys.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, PrecisionError, ResourceError
from .galois import GF, INF, FqPoly, field, list_add, list_mul, list_neg

DEFAULT_ENUM_BUDGET = 1 << 20


class TruncSeries:
    """An element ``t**shift * (c_0 + c_1 t + ...)`` of F_q((t)) known modulo ``t**prec``.

    ``prec`` is absolute.  After normalization ``coeffs[0] != 0`` unless the
    element is zero to its precision, in which case ``coeffs`` is empty and
    ``shift == prec``.
    """

    __slots__ = ("F", "shift", "coeffs", "prec")

    def __init__(self, F: GF, coeffs: Sequence[int], prec: int | None = None, shift: int = 0):
        coeffs = list(coeffs)
        if prec is None:
            prec = shift + len(coeffs)
        coeffs = coeffs[: max(prec - shift, 0)]
        lead = 0
        while lead < len(coeffs) and not coeffs[lead]:
            lead += 1
        if lead == len(coeffs):
            self.shift, self.coeffs = prec, ()
        else:
            self.shift, self.coeffs = shift + lead, tuple(coeffs[lead:])
        self.F, self.prec = F, prec

    @classmethod
    def from_poly(cls, p: FqPoly, prec: int) -> "TruncSeries":
        return cls(p.F, p.coeffs, prec)

    @classmethod
    def one(cls, F: GF, prec: int) -> "TruncSeries":
        return cls(F, [1], prec)

    @classmethod
    def t_power(cls, F: GF, e: int, prec: int) -> "TruncSeries":
        return cls(F, [1], prec, shift=e)

    def is_zero(self) -> bool:
        """Zero to the available precision."""
        return not self.coeffs

    def valuation(self) -> int:
        if not self.coeffs:
            raise PrecisionError(f"v_t undefined: element is zero modulo t^{self.prec}")
        return self.shift

    def abs_value(self) -> float:
        """``|a| = q**(-v_t(a))``; 0 for an exact zero is never claimed."""
        return float(self.F.q) ** (-self.valuation())

    def coeff(self, i: int) -> int:
        """Coefficient of ``t**i`` (absolute index)."""
        if i >= self.prec:
            raise PrecisionError(f"coefficient of t^{i} unknown (precision {self.prec})")
        j = i - self.shift
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def _dense(self, lo: int, hi: int) -> list[int]:
        return [self.coeff(i) for i in range(lo, hi)]

    def _align(self, other: "TruncSeries") -> tuple[int, int]:
        if other.F is not self.F:
            raise DomainError("operands over different fields")
        return min(self.shift, other.shift), min(self.prec, other.prec)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        lo, prec = self._align(other)
        lo = min(lo, prec)
        return TruncSeries(self.F, list_add(self.F, self._dense(lo, prec), other._dense(lo, prec)), prec, lo)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.F, list_neg(self.F, self.coeffs), self.prec, self.shift)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        if other.F is not self.F:
            raise DomainError("operands over different fields")
        prec = min(self.prec + other.shift, other.prec + self.shift)
        shift = self.shift + other.shift
        return TruncSeries(self.F, list_mul(self.F, self.coeffs, other.coeffs, prec - shift), prec, shift)

    def scale(self, c: int) -> "TruncSeries":
        row = self.F.mul_table[c]
        return TruncSeries(self.F, [row[x] for x in self.coeffs], self.prec, self.shift)

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse; loses ``2 * v_t(a)`` digits of absolute precision."""
        if not self.coeffs:
            raise PrecisionError(f"cannot invert an element that is zero modulo t^{self.prec}")
        v, F = self.shift, self.F
        rel = self.prec - v
        u = self.coeffs
        inv0 = F.inv(u[0])
        out = [inv0]
        for i in range(1, rel):
            s = 0
            for j in range(1, min(i, len(u) - 1) + 1):
                if u[j] and out[i - j]:
                    s = F.add(s, F.mul(u[j], out[i - j]))
            out.append(F.mul(F.neg(s), inv0))
        return TruncSeries(F, out, rel - v, -v)

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        return self * other.inverse()

    def __pow__(self, e: int) -> "TruncSeries":
        if e < 0:
            return self.inverse() ** (-e)
        r = TruncSeries(self.F, [1], 1 << 30)
        a = self
        while e:
            if e & 1:
                r = r * a
            e >>= 1
            if e:
                a = a * a
        return r

    def frobenius(self) -> "TruncSeries":
        """``a**q``, computed as ``a(t**q)``; precision is multiplied by q."""
        if self.coeffs and self.shift < 0:
            raise DomainError("Frobenius shortcut needs an element of F_q[[t]]")
        q = self.F.q
        dense = self._dense(0, self.prec)
        out = [0] * (q * len(dense))
        for i, c in enumerate(dense):
            out[q * i] = c
        return TruncSeries(self.F, out, q * self.prec)

    def shift_by(self, s: int) -> "TruncSeries":
        """Multiply by ``t**s`` (exact, any sign)."""
        return TruncSeries(self.F, self.coeffs, self.prec + s, self.shift + s)

    def with_prec(self, prec: int) -> "TruncSeries":
        if prec > self.prec:
            raise PrecisionError(f"cannot raise precision from {self.prec} to {prec}")
        return TruncSeries(self.F, self.coeffs, prec, self.shift)

    def to_poly(self) -> FqPoly:
        """The known coefficients as an exact polynomial in t (requires ``shift >= 0``)."""
        if self.shift < 0 and self.coeffs:
            raise DomainError("element is not in F_q[[t]]")
        if not self.coeffs:
            return FqPoly(self.F)
        return FqPoly(self.F, [0] * self.shift + list(self.coeffs))

    def project(self, ring: "QuotientRing") -> int:
        """Image in R = A/t^k A as an element code."""
        if ring.F is not self.F:
            raise DomainError("ring over a different field")
        if self.coeffs and self.shift < 0:
            raise DomainError("element is not in F_q[[t]]")
        if self.prec < ring.k:
            raise PrecisionError(f"need precision {ring.k}, have {self.prec}")
        return ring.from_digits(self._dense(0, ring.k))

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if other.F is not self.F:
            return False
        lo, prec = self._align(other)
        return self._dense(min(lo, prec), prec) == other._dense(min(lo, prec), prec)

    __hash__ = None

    def format(self) -> str:
        """Text form ``c0 + c1*t + ... (mod t^N)``."""
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            e = self.shift + i
            mono = "" if e == 0 else ("t" if e == 1 else f"t^{e}")
            terms.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return f"{' + '.join(terms) if terms else '0'} (mod t^{self.prec})"

    def digits(self) -> str:
        """Compact digit string ``c0c1...c{N-1}``; requires ``0 <= shift`` and q <= 10."""
        if self.F.q > 10:
            raise DomainError("digit strings need q <= 10")
        if self.coeffs and self.shift < 0:
            raise DomainError("digit strings encode elements of F_q[[t]] only")
        return "".join(str(c) for c in self._dense(0, self.prec))

    @classmethod
    def parse(cls, F: GF, text: str) -> "TruncSeries":
        """Inverse of :meth:`format` and of :meth:`digits`."""
        text = text.strip()
        if re.fullmatch(r"\d*", text):
            return cls(F, [int(ch) for ch in text], len(text))
        m = re.fullmatch(r"(.*)\(mod t\^(-?\d+)\)", text)
        if not m:
            raise DomainError(f"cannot parse series {text!r}")
        prec = int(m.group(2))
        body = m.group(1).strip()
        terms: dict[int, int] = {}
        if body != "0":
            for part in body.split("+"):
                part = part.strip()
                tm = re.fullmatch(r"(?:(\d+)\*?)?(t(?:\^(-?\d+))?)?", part)
                if not tm or (tm.group(1) is None and tm.group(2) is None):
                    raise DomainError(f"cannot parse term {part!r}")
                c = int(tm.group(1)) if tm.group(1) is not None else 1
                e = 0 if tm.group(2) is None else (int(tm.group(3)) if tm.group(3) else 1)
                terms[e] = F.add(terms.get(e, 0), c)
        lo = min(terms, default=0)
        lo = min(lo, 0)
        dense = [terms.get(i, 0) for i in range(lo, prec)]
        return cls(F, dense, prec, lo)

    def __repr__(self):
        return f"TruncSeries[{self.F.q}]({self.format()})"


class QuotientRing:
    """R = F_q[t]/(t^k) with elements coded as integers in ``range(q**k)``."""

    def __init__(self, q: int, k: int):
        if k < 1:
            raise DomainError("k must be positive")
        self.F = field(q)
        self.q, self.k = q, k
        self.size = q**k
        F = self.F
        self._digits = [tuple((x // q**j) % q for j in range(k)) for x in range(self.size)]
        size = self.size
        self.add_table = [[self.from_digits(list_add(F, self._digits[a], self._digits[b])) for b in range(size)] for a in range(size)]
        self.mul_table = [[self.from_digits(list_mul(F, self._digits[a], self._digits[b], k)) for b in range(size)] for a in range(size)]
        self.neg_table = [self.from_digits(list_neg(F, d)) for d in self._digits]
        self.val_table = [next((j for j, c in enumerate(d) if c), INF) for d in self._digits]
        self.add_array = np.array(self.add_table, dtype=np.int64)
        self.mul_array = np.array(self.mul_table, dtype=np.int64)
        self.neg_array = np.array(self.neg_table, dtype=np.int64)

    def __repr__(self):
        return f"QuotientRing(q={self.q}, k={self.k})"

    def __reduce__(self):
        return (quotient_ring, (self.q, self.k))

    def digits(self, a: int) -> tuple[int, ...]:
        if not 0 <= a < self.size:
            raise DomainError(f"{a} is not an element code of R (q={self.q}, k={self.k})")
        return self._digits[a]

    def from_digits(self, ds: Sequence[int]) -> int:
        ds = list(ds)[: self.k]
        return sum(c * self.q**j for j, c in enumerate(ds))

    def from_poly(self, p: FqPoly) -> int:
        return self.from_digits(p.coeffs[: self.k])

    def to_poly(self, a: int) -> FqPoly:
        return FqPoly(self.F, self._digits[a])

    def to_series(self, a: int, prec: int | None = None) -> TruncSeries:
        return TruncSeries(self.F, self._digits[a], self.k if prec is None else prec)

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def valuation(self, a: int):
        """v_t of the canonical representative; ``inf`` for 0."""
        return self.val_table[a]

    def is_unit(self, a: int) -> bool:
        return self.val_table[a] == 0

    def inv(self, a: int) -> int:
        if not self.is_unit(a):
            raise DomainError(f"{self.format(a)} is not a unit of R")
        return self.mul_table[a].index(1)

    @cached_property
    def units(self) -> tuple[int, ...]:
        return tuple(a for a in range(self.size) if self.val_table[a] == 0)

    def elements(self) -> range:
        return range(self.size)

    def format(self, a: int) -> str:
        return TruncSeries(self.F, self._digits[a], self.k).format()

    def digit_string(self, a: int) -> str:
        return "".join(str(c) for c in self._digits[a])

    def parse_digits(self, s: str) -> int:
        s = s.strip()
        if len(s) != self.k or not s.isdigit() or any(int(ch) >= self.q for ch in s):
            raise DomainError(f"{s!r} is not a {self.k}-digit element of R (q={self.q})")
        return self.from_digits([int(ch) for ch in s])

    def is_primitive(self, v: Sequence[int]) -> bool:
        return any(x % self.q for x in v)


@lru_cache(maxsize=None)
def quotient_ring(q: int, k: int) -> QuotientRing:
    return QuotientRing(q, k)


def enumerate_R(k: int, n: int, q: int, primitive_only: bool = False,
                budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[tuple[int, ...]]:
    """Yield every vector of R^n (or only the primitive ones) in lexicographic code order."""
    total = q ** (k * n)
    if total > budget:
        raise ResourceError(f"|R^n| = {total} exceeds enumeration budget {budget}")
    size = q**k
    for v in itertools.product(range(size), repeat=n):
        if primitive_only and not any(x % q for x in v):
            continue
        yield v


def count_primitive(k: int, n: int, q: int) -> int:
    """|S^{n-1}(R)| = q^{kn} - q^{(k-1)n}."""
    return q ** (k * n) - q ** ((k - 1) * n)


@dataclass(frozen=True)
class RVector:
    """A point of R^n with its ring; a thin convenience wrapper around a code tuple."""

    ring: QuotientRing
    coords: tuple[int, ...]

    def is_primitive(self) -> bool:
        return self.ring.is_primitive(self.coords)

    def __add__(self, other: "RVector") -> "RVector":
        return RVector(self.ring, tuple(self.ring.add(a, b) for a, b in zip(self.coords, other.coords)))

    def scale(self, a: int) -> "RVector":
        return RVector(self.ring, tuple(self.ring.mul(a, x) for x in self.coords))

    def format(self) -> str:
        return ",".join(self.ring.digit_string(x) for x in self.coords)
