"""Exact arithmetic in F_q and in the polynomial ring F_q[X].

Field elements are coded as integers ``0 <= x < q``.  For ``q = p**m`` with
``m > 1`` the code of ``d_0 + d_1 u + ... + d_{m-1} u^{m-1}`` is
``d_0 + d_1 p + ... + d_{m-1} p^{m-1}``, where ``u`` is a root of the modulus
returned by :func:`conway_free_modulus`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

INF = math.inf


def _prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise DomainError(f"q={q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise DomainError(f"q={q} is not a prime power")
    return p, m


def _fp_polymod_zero(num: list[int], den: list[int], p: int) -> bool:
    """True iff den divides num over F_p (lists are low-degree first, den monic)."""
    r = list(num)
    dd = len(den) - 1
    for i in range(len(r) - 1, dd - 1, -1):
        c = r[i] % p
        if c:
            for j in range(dd + 1):
                r[i - dd + j] = (r[i - dd + j] - c * den[j]) % p
    return not any(x % p for x in r[:dd])


def conway_free_modulus(p: int, m: int) -> tuple[int, ...]:
    """The fixed modulus used for F_{p^m}.

    It is the monic irreducible polynomial of degree ``m`` whose lower
    coefficients, read as base-``p`` digits, form the smallest integer.  The
    result is returned low-degree first, e.g. ``(1, 1, 1)`` for ``u^2+u+1``.
    """
    if m == 1:
        return (0, 1)
    for code in range(p**m):
        low = [(code // p**i) % p for i in range(m)]
        cand = low + [1]
        if low[0] == 0:
            continue
        reducible = False
        for deg in range(1, m // 2 + 1):
            for dcode in range(p**deg):
                div = [(dcode // p**i) % p for i in range(deg)] + [1]
                if _fp_polymod_zero(cand, div, p):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class GF:
    """The finite field with ``q`` elements, backed by lookup tables.

    Use :func:`field` to obtain cached instances.
    """

    def __init__(self, q: int):
        self.q = q
        self.p, self.m = _prime_power(q)
        self.is_prime = self.m == 1
        self.modulus = conway_free_modulus(self.p, self.m)
        p, m = self.p, self.m
        if self.is_prime:
            add = [[(a + b) % p for b in range(q)] for a in range(q)]
            mul = [[(a * b) % p for b in range(q)] for a in range(q)]
        else:
            digits = [[(x // p**i) % p for i in range(m)] for x in range(q)]

            def encode(ds):
                return sum((d % p) * p**i for i, d in enumerate(ds))

            add = [[encode([x + y for x, y in zip(digits[a], digits[b])]) for b in range(q)] for a in range(q)]
            mul = [[0] * q for _ in range(q)]
            for a in range(q):
                for b in range(q):
                    prod = [0] * (2 * m - 1)
                    for i, x in enumerate(digits[a]):
                        for j, y in enumerate(digits[b]):
                            prod[i + j] += x * y
                    for i in range(2 * m - 2, m - 1, -1):
                        c = prod[i] % p
                        if c:
                            for j in range(m):
                                prod[i - m + j] -= c * self.modulus[j]
                        prod[i] = 0
                    mul[a][b] = encode(prod[:m])
        self.add_table = add
        self.mul_table = mul
        self.neg_table = [add[a].index(0) for a in range(q)]
        self.inv_table = [0] + [mul[a].index(1) for a in range(1, q)]
        self.add_array = np.array(add, dtype=np.int64)
        self.mul_array = np.array(mul, dtype=np.int64)
        self.neg_array = np.array(self.neg_table, dtype=np.int64)

    def __repr__(self):
        return f"GF({self.q})"

    def __reduce__(self):
        return (field, (self.q,))

    # scalar arithmetic on codes
    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero in F_q")
        return self.inv_table[a]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r = 1
        while e:
            if e & 1:
                r = self.mul_table[r][a]
            a = self.mul_table[a][a]
            e >>= 1
        return r

    def from_int(self, x: int) -> int:
        """Image of the integer ``x`` under Z -> F_p -> F_q."""
        return x % self.p

    def elem(self, x) -> "FqElem":
        if isinstance(x, FqElem):
            return x
        if not 0 <= x < self.q:
            raise DomainError(f"{x} is not an element code of GF({self.q})")
        return FqElem(self, int(x))

    def elements(self) -> range:
        return range(self.q)

    def random(self, rng: random.Random, nonzero: bool = False) -> int:
        return rng.randrange(1 if nonzero else 0, self.q)


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    """Cached :class:`GF` instance for ``q``."""
    return GF(q)


@dataclass(frozen=True)
class FqElem:
    """An element of F_q with operator support."""

    F: GF
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FqElem):
            if other.F is not self.F:
                raise DomainError("operands from different fields")
            return other.value
        if isinstance(other, int):
            return self.F.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FqElem(self.F, self.F.add(self.value, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FqElem(self.F, self.F.sub(self.value, b))

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FqElem(self.F, self.F.sub(b, self.value))

    def __neg__(self):
        return FqElem(self.F, self.F.neg(self.value))

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FqElem(self.F, self.F.mul(self.value, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return FqElem(self.F, self.F.mul(self.value, self.F.inv(b)))

    def __pow__(self, e: int):
        return FqElem(self.F, self.F.pow(self.value, e))

    def inverse(self) -> "FqElem":
        return FqElem(self.F, self.F.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FqElem):
            return self.F is other.F and self.value == other.value
        if isinstance(other, int):
            return self.value == self.F.from_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.F.q, self.value))

    def __bool__(self):
        return self.value != 0

    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self):
        return f"FqElem({self.value} in GF({self.F.q}))"


# --- dense coefficient-list kernels (lists are low-degree first) ------------


def trim(c: Sequence[int]) -> tuple[int, ...]:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def list_add(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    add = F.add_table
    for i, y in enumerate(b):
        if y:
            out[i] = add[out[i]][y]
    return out


def list_neg(F: GF, a: Sequence[int]) -> list[int]:
    neg = F.neg_table
    return [neg[x] for x in a]


def list_sub(F: GF, a: Sequence[int], b: Sequence[int]) -> list[int]:
    return list_add(F, a, list_neg(F, b))


def list_scale(F: GF, a: Sequence[int], c: int) -> list[int]:
    row = F.mul_table[c]
    return [row[x] for x in a]


def list_mul(F: GF, a: Sequence[int], b: Sequence[int], limit: int | None = None) -> list[int]:
    """Product of coefficient lists, truncated to ``limit`` coefficients."""
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if limit is not None:
        n = min(n, limit)
        if n <= 0:
            return []
    if F.is_prime:
        p = F.p
        acc = [0] * n
        for i, x in enumerate(a):
            if x and i < n:
                for j in range(min(len(b), n - i)):
                    y = b[j]
                    if y:
                        acc[i + j] += x * y
        return [v % p for v in acc]
    acc = [0] * n
    add, mul = F.add_table, F.mul_table
    for i, x in enumerate(a):
        if x and i < n:
            row = mul[x]
            for j in range(min(len(b), n - i)):
                y = b[j]
                if y:
                    acc[i + j] = add[acc[i + j]][row[y]]
    return acc


class FqPoly:
    """A univariate polynomial over F_q, immutable, dense.

    Used both for the ring B = F_q[X] (where :meth:`valuation` is the X-adic
    valuation v_X) and for exact elements of F_q[t].
    """

    __slots__ = ("F", "coeffs", "_hash")

    def __init__(self, F: GF, coeffs: Iterable[int] = ()):
        self.F = F
        self.coeffs = trim(list(coeffs))
        self._hash = None

    @classmethod
    def monomial(cls, F: GF, deg: int, c: int = 1) -> "FqPoly":
        return cls(F, [0] * deg + [c])

    @classmethod
    def constant(cls, F: GF, c: int) -> "FqPoly":
        return cls(F, [c])

    @classmethod
    def random(cls, F: GF, max_deg: int, rng: random.Random) -> "FqPoly":
        return cls(F, [rng.randrange(F.q) for _ in range(max_deg + 1)])

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def valuation(self) -> float:
        """Index of the first nonzero coefficient; ``inf`` for zero."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return INF

    def _lift(self, other) -> "FqPoly":
        if isinstance(other, FqPoly):
            if other.F is not self.F:
                raise DomainError("operands over different fields")
            return other
        if isinstance(other, FqElem):
            return FqPoly(self.F, [other.value])
        if isinstance(other, int):
            return FqPoly(self.F, [self.F.from_int(other)])
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return FqPoly(self.F, list_add(self.F, self.coeffs, o.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return FqPoly(self.F, list_neg(self.F, self.coeffs))

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return FqPoly(self.F, list_sub(self.F, self.coeffs, o.coeffs))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return FqPoly(self.F, list_mul(self.F, self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "FqPoly":
        if e < 0:
            raise DomainError("negative power of a polynomial")
        r, a = FqPoly(self.F, [1]), self
        while e:
            if e & 1:
                r = r * a
            e >>= 1
            if e:
                a = a * a
        return r

    def scale(self, c: int) -> "FqPoly":
        return FqPoly(self.F, list_scale(self.F, self.coeffs, c))

    def shift(self, s: int) -> "FqPoly":
        """Multiply by X**s (s >= 0) or drop the lowest -s coefficients."""
        if s >= 0:
            return FqPoly(self.F, [0] * s + list(self.coeffs)) if self.coeffs else self
        return FqPoly(self.F, self.coeffs[-s:])

    def truncate(self, n: int) -> "FqPoly":
        """Reduce modulo X**n."""
        return FqPoly(self.F, self.coeffs[:n])

    def divmod(self, other: "FqPoly") -> tuple["FqPoly", "FqPoly"]:
        if other.is_zero():
            raise DomainError("division by the zero polynomial")
        F = self.F
        r = list(self.coeffs)
        dd = other.degree
        inv_lead = F.inv(other.leading())
        quot = [0] * max(len(r) - dd, 0)
        for i in range(len(r) - 1, dd - 1, -1):
            c = r[i]
            if c:
                c = F.mul(c, inv_lead)
                quot[i - dd] = c
                for j, d in enumerate(other.coeffs):
                    if d:
                        r[i - dd + j] = F.sub(r[i - dd + j], F.mul(c, d))
        return FqPoly(F, quot), FqPoly(F, r[:dd] if dd > 0 else [])

    def __divmod__(self, other):
        return self.divmod(other)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "FqPoly":
        if self.is_zero():
            return self
        return self.scale(self.F.inv(self.leading()))

    def gcd(self, other: "FqPoly") -> "FqPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __call__(self, x):
        """Evaluate at a field code, an :class:`FqElem` or compose with a polynomial."""
        if isinstance(x, FqPoly):
            acc = FqPoly(self.F)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        v = x.value if isinstance(x, FqElem) else x
        F = self.F
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, v), c)
        return FqElem(F, acc) if isinstance(x, FqElem) else acc

    def frobenius(self, j: int = 1) -> "FqPoly":
        """Substitute X -> X**(q**j); equals self**(q**j) since coefficients lie in F_q."""
        step = self.F.q**j
        out = [0] * (step * self.degree + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[i * step] = c
        return FqPoly(self.F, out)

    def __eq__(self, other):
        if isinstance(other, FqPoly):
            return self.F is other.F and self.coeffs == other.coeffs
        if isinstance(other, (int, FqElem)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.F.q, self.coeffs))
        return self._hash

    def to_list(self) -> list[int]:
        """Serialization: coefficient list, lowest degree first."""
        return list(self.coeffs)

    @classmethod
    def from_list(cls, F: GF, coeffs: Sequence[int]) -> "FqPoly":
        return cls(F, coeffs)

    def format(self, var: str = "X") -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms)

    def __repr__(self):
        return f"FqPoly[{self.F.q}]({self.format()})"


XPoly = FqPoly
