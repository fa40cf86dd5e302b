"""The Lubin-Tate polynomial f(X) = tX + X^q, the action [a]_f, and the ramified extension.

Polynomials in X with coefficients in F_q[t] are :class:`TPoly` objects.  The
extension L = K(Lambda_k) is represented through its Eisenstein factor
``g_k = f^{k} / f^{k-1}`` of degree ``e = q^{k-1}(q-1)``:

    O_L / t^N  =  (F_q[t]/t^N)[pi] / (g_k(pi)),

so ``pi`` is a uniformizer (``v_L(pi) = 1``, ``v_L(t) = e``) and is itself a
root of f^{k} of full order; it plays the role of the generator zeta_1.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import ConsistencyError, DomainError, PrecisionError, PreconditionError, ResourceError
from .galois import GF, INF, FqElem, FqPoly, field, list_add, list_mul, list_neg, list_scale
from .laurent import QuotientRing, TruncSeries, quotient_ring

DEFAULT_EXT_BUDGET = 20_000  # max e*N coefficients per ExtElem


class TPoly:
    """A polynomial in X over F_q[t], stored sparsely as ``{exponent: FqPoly in t}``.

    ``prec`` optionally records, per exponent, the t-adic precision to which the
    coefficient is known (``None`` means exact).
    """

    __slots__ = ("F", "terms", "prec")

    def __init__(self, F: GF, terms: Mapping[int, FqPoly] | None = None, prec: Mapping[int, int] | None = None):
        self.F = F
        self.terms = {e: c for e, c in (terms or {}).items() if not c.is_zero()}
        self.prec = dict(prec) if prec else None

    @classmethod
    def X(cls, F: GF) -> "TPoly":
        return cls(F, {1: FqPoly(F, [1])})

    @classmethod
    def constant(cls, c: FqPoly) -> "TPoly":
        return cls(c.F, {0: c})

    @property
    def degree(self) -> int:
        return max(self.terms, default=-1)

    def coeff(self, e: int) -> FqPoly:
        return self.terms.get(e, FqPoly(self.F))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TPoly") -> "TPoly":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return TPoly(self.F, out)

    def __neg__(self) -> "TPoly":
        return TPoly(self.F, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "TPoly") -> "TPoly":
        return self + (-other)

    def __mul__(self, other) -> "TPoly":
        if isinstance(other, FqPoly):
            return TPoly(self.F, {e: c * other for e, c in self.terms.items()})
        out: dict[int, FqPoly] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                prod = c1 * c2
                e = e1 + e2
                out[e] = out[e] + prod if e in out else prod
        return TPoly(self.F, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TPoly":
        r = TPoly.constant(FqPoly(self.F, [1]))
        a = self
        while n:
            if n & 1:
                r = r * a
            n >>= 1
            if n:
                a = a * a
        return r

    def frobenius(self) -> "TPoly":
        """``self**q`` computed termwise: (c(t) X^e)^q = c(t^q) X^{eq}."""
        q = self.F.q
        return TPoly(self.F, {e * q: c.frobenius() for e, c in self.terms.items()})

    def compose(self, other: "TPoly") -> "TPoly":
        """``self(other(X))`` by plain substitution; works for any polynomials."""
        out = TPoly(self.F)
        power = TPoly.constant(FqPoly(self.F, [1]))
        last = 0
        for e in sorted(self.terms):
            power = power * other ** (e - last)
            last = e
            out = out + power * self.terms[e]
        return out

    def truncate_t(self, N: int) -> "TPoly":
        """Reduce every coefficient modulo t^N."""
        return TPoly(self.F, {e: c.truncate(N) for e, c in self.terms.items()})

    def residue(self) -> FqPoly:
        """Reduction modulo t: a polynomial in X over F_q."""
        deg = self.degree
        out = [0] * (deg + 1)
        for e, c in self.terms.items():
            out[e] = c.coeff(0)
        return FqPoly(self.F, out)

    def divmod(self, other: "TPoly") -> tuple["TPoly", "TPoly"]:
        """Division by a polynomial whose leading coefficient is 1."""
        lead = other.coeff(other.degree)
        if lead != FqPoly(self.F, [1]):
            raise DomainError("divisor must have leading coefficient 1")
        d = other.degree
        rem = dict(self.terms)
        quot: dict[int, FqPoly] = {}
        for e in range(self.degree, d - 1, -1):
            c = rem.pop(e, None)
            if c is None or c.is_zero():
                continue
            quot[e - d] = c
            for e2, c2 in other.terms.items():
                if e2 == d:
                    continue
                tgt = e - d + e2
                val = rem.get(tgt, FqPoly(self.F)) - c * c2
                rem[tgt] = val
        return TPoly(self.F, quot), TPoly(self.F, rem)

    def is_additive(self) -> bool:
        q = self.F.q
        for e in self.terms:
            while e % q == 0 and e > 1:
                e //= q
            if e != 1:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, TPoly):
            return NotImplemented
        return self.F is other.F and self.terms == other.terms

    __hash__ = None

    def evaluate(self, x: "ExtElem") -> "ExtElem":
        """Evaluate at an element of L_N."""
        L = x.L
        out = L.zero()
        power = L.one()
        last = 0
        for e in sorted(self.terms):
            power = power * x ** (e - last) if e != last else power
            last = e
            out = out + power * L.scalar(self.terms[e])
        return out

    def to_json(self) -> dict:
        return {str(e): c.to_list() for e, c in sorted(self.terms.items())}

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            c = self.terms[e].format("t")
            mono = "" if e == 0 else ("X" if e == 1 else f"X^{e}")
            if not mono:
                parts.append(f"({c})")
            elif c == "1":
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"TPoly[{self.F.q}]({self.format()})"


def _t(F: GF) -> FqPoly:
    return FqPoly(F, [0, 1])


@lru_cache(maxsize=None)
def iterate_f(q: int, k: int) -> TPoly:
    """f^{k}, the k-fold composition of f(X) = tX + X^q (f^{0} = X), exact over F_q[t]."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    F = field(q)
    out = TPoly.X(F)
    t = _t(F)
    for _ in range(k):
        out = out * t + out.frobenius()
    return out


def lubin_tate_f(q: int) -> TPoly:
    return iterate_f(q, 1)


def bracket_poly(ring: QuotientRing, a: int) -> TPoly:
    """[a]_f = sum_j c_j f^{j}(X) for a = sum_j c_j t^j in A_k (exact polynomial)."""
    out = TPoly(ring.F)
    for j, c in enumerate(ring.digits(a)):
        if c:
            out = out + iterate_f(ring.q, j) * FqPoly(ring.F, [c])
    return out


def bracket_series(a: TruncSeries, terms: int | None = None, k: int | None = None) -> TPoly:
    """Truncated [a]_f = sum_m a_m X^{q^m} from the recursion a_m = (a_{m-1}^q - a_{m-1}) / (t^{q^m} - t).

    Returns the first ``terms`` monomials (default ``k + 2`` when ``k`` is given,
    else 3).  Each step divides by t, so coefficient ``a_m`` is known to
    precision ``a.prec - m``; the per-exponent precisions are kept in ``prec``.
    """
    F = a.F
    q = F.q
    if terms is None:
        terms = (k + 2) if k is not None else 3
    if a.coeffs and a.shift < 0:
        raise DomainError("[a]_f needs a in F_q[[t]]")
    coeffs: dict[int, FqPoly] = {}
    precs: dict[int, int] = {}
    cur = a
    for m in range(terms):
        if m > 0:
            num = cur.frobenius() - cur
            if num.prec < 2:
                raise PrecisionError(f"insufficient t-precision for a_{m} (have {num.prec})")
            if num.coeff(0):
                raise ConsistencyError("a_{m-1}^q - a_{m-1} is not divisible by t")
            num = num.shift_by(-1)
            unit = TruncSeries.t_power(F, q**m - 1, num.prec) - TruncSeries.one(F, num.prec)
            cur = num * unit.inverse()
        precs[q**m] = cur.prec
        coeffs[q**m] = cur.to_poly()
    return TPoly(F, coeffs, precs)


def s_map(ring: QuotientRing, a: int) -> FqPoly:
    """s_a = sum_j a_j X^{q^j}, an additive polynomial over F_q."""
    ds = ring.digits(a)
    if not any(ds):
        return FqPoly(ring.F)
    out = [0] * (ring.q ** (ring.k - 1) + 1)
    for j, c in enumerate(ds):
        out[ring.q**j] = c
    return FqPoly(ring.F, out)


# --- Newton polygon / Eisenstein ----------------------------------------------


def newton_polygon(h: TPoly) -> list[tuple[Fraction, int]]:
    """Lower convex hull of ``(i, v_t(a_i))``; returns ``(slope, width)`` segments left to right.

    Roots of ``h`` with ``v_t = -slope`` occur with multiplicity ``width``
    (zero roots, from a vanishing constant term, are not reported).
    """
    pts = sorted((e, c.valuation()) for e, c in h.terms.items())
    if not pts:
        raise DomainError("Newton polygon of the zero polynomial")
    hull: list[tuple[int, int]] = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return [(Fraction(y2 - y1, x2 - x1), x2 - x1) for (x1, y1), (x2, y2) in zip(hull, hull[1:])]


def newton_check(h: TPoly) -> Fraction:
    """Root valuation (in v_t units) of an Eisenstein polynomial: 1/deg h.

    Raises :class:`PreconditionError` naming the offending coefficient when
    ``h`` is not Eisenstein: ``v_t(a_0) = 1``, ``v_t(a_j) >= 1`` for
    ``0 < j < m`` and ``v_t(a_m) = 0``.
    """
    m = h.degree
    if m < 1:
        raise PreconditionError("Eisenstein check needs degree >= 1")
    if h.coeff(0).valuation() != 1:
        raise PreconditionError(f"coefficient 0 has v_t = {h.coeff(0).valuation()}, need 1")
    for j in range(1, m):
        if h.coeff(j).valuation() < 1:
            raise PreconditionError(f"coefficient {j} is a unit, need v_t >= 1")
    if h.coeff(m).valuation() != 0:
        raise PreconditionError(f"leading coefficient {m} has v_t = {h.coeff(m).valuation()}, need 0")
    return Fraction(1, m)


def eisenstein_factor(q: int, k: int) -> TPoly:
    """g_k = f^{k} / f^{k-1}, by exact division (nonzero remainder is an internal error)."""
    if k < 1:
        raise DomainError("k must be positive")
    quot, rem = iterate_f(q, k).divmod(iterate_f(q, k - 1))
    if not rem.is_zero():
        raise ConsistencyError(f"f^{k} is not divisible by f^{k - 1}")
    return quot


# --- the extension L_N --------------------------------------------------------


class ExtField:
    """Context for L_N = (F_q[t]/t^N)[pi]/(g_k(pi)); immutable after construction."""

    def __init__(self, q: int, k: int, N: int | None = None, budget: int = DEFAULT_EXT_BUDGET):
        if k < 1:
            raise DomainError("k must be positive")
        self.q, self.k = q, k
        self.N = k + 2 if N is None else N
        if self.N < 1:
            raise DomainError("precision N must be positive")
        self.F = field(q)
        self.ring = quotient_ring(q, k)
        self.e = q ** (k - 1) * (q - 1)
        if self.e * self.N > budget:
            raise ResourceError(f"extension needs e*N = {self.e * self.N} coefficients (budget {budget})")
        self.horizon = self.e * self.N
        self.g = eisenstein_factor(q, k)
        if self.g.degree != self.e:
            raise ConsistencyError("deg g_k != e")
        newton_check(self.g)
        # pi^e = -(a_0 + ... + a_{e-1} pi^{e-1}); keep -a_j truncated mod t^N
        self._red = [list_neg(self.F, self._tlist(self.g.coeff(j).coeffs)) for j in range(self.e)]
        self.zeta1 = self._from_raw([[0] * self.N, [1] + [0] * (self.N - 1)])
        self._f_iterates = None
        self._orbit: dict[int, ExtElem] | None = None

    def __repr__(self):
        return f"ExtField(q={self.q}, k={self.k}, N={self.N}, e={self.e})"

    def __reduce__(self):
        return (ExtField, (self.q, self.k, self.N))

    def _tlist(self, coeffs: Sequence[int]) -> list[int]:
        out = list(coeffs[: self.N])
        return out + [0] * (self.N - len(out))

    def _reduce_raw(self, rows: list[list[int]]) -> list[list[int]]:
        """Reduce a polynomial in pi (rows of t-lists) modulo g_k."""
        e, N, F = self.e, self.N, self.F
        rows = [self._tlist(r) for r in rows]
        for i in range(len(rows) - 1, e - 1, -1):
            c = rows[i]
            if any(c):
                for j in range(e):
                    red = self._red[j]
                    if any(red):
                        rows[i - e + j] = list_add(F, rows[i - e + j], list_mul(F, c, red, N))
                        rows[i - e + j] = self._tlist(rows[i - e + j])
        rows = rows[:e]
        while len(rows) < e:
            rows.append([0] * N)
        return rows

    def _from_raw(self, rows, prec: int | None = None) -> "ExtElem":
        return ExtElem(self, self._reduce_raw(rows), self.horizon if prec is None else prec)

    def zero(self) -> "ExtElem":
        return ExtElem(self, [[0] * self.N for _ in range(self.e)], self.horizon)

    def one(self) -> "ExtElem":
        return self.scalar(FqPoly(self.F, [1]))

    def scalar(self, c) -> "ExtElem":
        """Embed an element of F_q, F_q[t], a :class:`TruncSeries` or an R-code (int)."""
        prec = self.horizon
        if isinstance(c, FqElem):
            coeffs = [c.value]
        elif isinstance(c, FqPoly):
            coeffs = list(c.coeffs)
        elif isinstance(c, TruncSeries):
            if c.coeffs and c.shift < 0:
                raise DomainError("only elements of F_q[[t]] embed into O_L")
            coeffs = c.to_poly().coeffs if c.coeffs else []
            prec = min(prec, self.e * c.prec)
        elif isinstance(c, int):
            coeffs = list(self.ring.digits(c))
        else:
            raise DomainError(f"cannot embed {c!r}")
        rows = [self._tlist(coeffs)] + [[0] * self.N for _ in range(self.e - 1)]
        return ExtElem(self, rows, prec)

    def pi_power(self, d: int) -> "ExtElem":
        return self.zeta1**d

    def f_iterates(self) -> list["ExtElem"]:
        """[f^{0}(zeta_1), ..., f^{k}(zeta_1)]."""
        if self._f_iterates is None:
            vals = [self.zeta1]
            for _ in range(self.k):
                vals.append(apply_f(vals[-1]))
            self._f_iterates = vals
        return self._f_iterates

    def zeta(self, a: int) -> "ExtElem":
        """zeta_a = [a]_f(zeta_1) for an R-code ``a``."""
        if self._orbit is None:
            self._orbit = {}
        z = self._orbit.get(a)
        if z is None:
            its = self.f_iterates()
            z = self.zero()
            for j, c in enumerate(self.ring.digits(a)):
                if c:
                    z = z + its[j].scale(c)
            self._orbit[a] = z
        return z

    def orbit(self) -> dict[int, "ExtElem"]:
        return {a: self.zeta(a) for a in self.ring.elements()}

    def elem_from_json(self, data: dict) -> "ExtElem":
        rows = [self._tlist(r) for r in data["coeffs"]]
        return ExtElem(self, rows + [[0] * self.N for _ in range(self.e - len(rows))], int(data["prec"]))

    def to_json(self) -> dict:
        return {
            "q": self.q, "k": self.k, "N": self.N, "e": self.e,
            "g_k": self.g.to_json(),
            "zeta_1": "residue class of pi (root of g_k)",
        }


def build_extension(q: int, k: int, N: int | None = None, budget: int = DEFAULT_EXT_BUDGET) -> ExtField:
    return _build_extension(q, k, k + 2 if N is None else N, budget)


@lru_cache(maxsize=32)
def _build_extension(q, k, N, budget):
    return ExtField(q, k, N, budget)


class ExtElem:
    """An element of O_L / t^N: ``sum_i c_i(t) pi^i`` with ``i < e``, known modulo ``pi^prec``.

    Coefficients are stored as ``e`` lists of ``N`` field codes; entries at or
    beyond the precision (``e*j + i >= prec`` for ``t^j pi^i``) are zeroed so
    equal elements have equal storage.
    """

    __slots__ = ("L", "rows", "prec", "_val")

    def __init__(self, L: ExtField, rows: list[list[int]], prec: int):
        self.L = L
        prec = min(prec, L.horizon)
        e, N = L.e, L.N
        clean = []
        for i, r in enumerate(rows):
            # t^j pi^i is known iff e*j + i < prec
            keep = max(0, min(N, -(-(prec - i) // e)))
            clean.append(tuple(r[:keep]) + (0,) * (N - keep))
        self.rows = tuple(clean)
        self.prec = prec
        self._val = None

    def _check(self, other: "ExtElem"):
        if other.L is not self.L:
            raise DomainError("operands from different extensions")

    def _val_or_prec(self) -> int:
        v = self._lowest()
        return self.prec if v is None else v

    def _lowest(self):
        if self._val is None:
            e = self.L.e
            best = None
            for i, r in enumerate(self.rows):
                for j, c in enumerate(r):
                    if c:
                        v = e * j + i
                        if best is None or v < best:
                            best = v
                        break
            self._val = -1 if best is None else best
        return None if self._val == -1 else self._val

    def valuation(self) -> int:
        """v_L; raises :class:`PrecisionError` if zero to working precision."""
        v = self._lowest()
        if v is None:
            raise PrecisionError(f"v_L undefined: element is zero modulo pi^{self.prec}")
        return v

    def is_zero(self) -> bool:
        return self._lowest() is None

    def __bool__(self):
        return not self.is_zero()

    def residue(self) -> FqElem:
        """Image in O_L / m_L = F_q."""
        if self.prec < 1:
            raise PrecisionError("residue unknown: precision below 1")
        return FqElem(self.L.F, self.rows[0][0])

    def __add__(self, other: "ExtElem") -> "ExtElem":
        self._check(other)
        F = self.L.F
        return ExtElem(self.L, [list_add(F, a, b) for a, b in zip(self.rows, other.rows)], min(self.prec, other.prec))

    def __neg__(self) -> "ExtElem":
        F = self.L.F
        return ExtElem(self.L, [list_neg(F, a) for a in self.rows], self.prec)

    def __sub__(self, other: "ExtElem") -> "ExtElem":
        return self + (-other)

    def scale(self, c: int) -> "ExtElem":
        """Multiply by a field code."""
        F = self.L.F
        return ExtElem(self.L, [list_scale(F, a, c) for a in self.rows], self.prec)

    def __mul__(self, other: "ExtElem") -> "ExtElem":
        if isinstance(other, int):
            return self.scale(self.L.F.from_int(other))
        self._check(other)
        L = self.L
        F, e, N = L.F, L.e, L.N
        prec = min(self.prec + other._val_or_prec(), other.prec + self._val_or_prec(), L.horizon)
        acc = [[0] * N for _ in range(2 * e - 1)]
        ys = [(j, b) for j, b in enumerate(other.rows) if any(b)]
        for i, a in enumerate(self.rows):
            if not any(a):
                continue
            for j, b in ys:
                acc[i + j] = list_add(F, acc[i + j], list_mul(F, a, b, N))
        return L._from_raw(acc, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ExtElem":
        if n < 0:
            return self.inverse() ** (-n)
        r = self.L.one()
        a = self
        while n:
            if n & 1:
                r = r * a
            n >>= 1
            if n:
                a = a * a
        return r

    def div_pi_power(self, d: int) -> "ExtElem":
        """Exact division by pi^d; requires v_L >= d and loses d digits of precision."""
        if d == 0:
            return self
        if d < 0:
            return self * self.L.pi_power(-d)
        L = self.L
        e = L.e
        j = -(-d // e)
        y = self * L.pi_power(j * e - d) if j * e != d else self
        rows = []
        for r in y.rows:
            if any(r[:j]):
                raise DomainError(f"element has v_L < {d}; not divisible by pi^{d}")
            rows.append(list(r[j:]) + [0] * j)
        return ExtElem(L, rows, min(y.prec, L.horizon) - j * e)

    def inverse(self) -> "ExtElem":
        """Inverse of a unit of O_L (Newton iteration)."""
        if self.prec < 1:
            raise PrecisionError("cannot invert: precision below 1")
        r0 = self.rows[0][0]
        if not r0:
            raise DomainError("element is not a unit of O_L")
        L = self.L
        z = L.scalar(FqElem(L.F, L.F.inv(r0)))
        two = L.scalar(FqElem(L.F, L.F.from_int(2)))
        known = 1
        exact_self = ExtElem(L, [list(r) for r in self.rows], L.horizon)
        while known < L.horizon:
            z = z * (two - exact_self * z)
            known *= 2
        return ExtElem(L, [list(r) for r in z.rows], self.prec)

    def __truediv__(self, other: "ExtElem") -> "ExtElem":
        d = other.valuation()
        return self.div_pi_power(d) * other.div_pi_power(d).inverse()

    def __eq__(self, other):
        if not isinstance(other, ExtElem):
            return NotImplemented
        if other.L is not self.L:
            return False
        p = min(self.prec, other.prec)
        return (self - other).is_zero() if p < self.L.horizon else self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def key(self) -> tuple:
        return self.rows

    def to_json(self) -> dict:
        rows = [list(r) for r in self.rows]
        while rows and not any(rows[-1]):
            rows.pop()
        return {"prec": self.prec, "coeffs": rows}

    def format(self) -> str:
        parts = []
        for i, r in enumerate(self.rows):
            if any(r):
                c = FqPoly(self.L.F, r).format("t")
                mono = "" if i == 0 else ("pi" if i == 1 else f"pi^{i}")
                parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return f"{' + '.join(parts) if parts else '0'} (mod pi^{self.prec})"

    def __repr__(self):
        return f"ExtElem({self.format()})"


def apply_f(x: ExtElem) -> ExtElem:
    """f(x) = t x + x^q."""
    L = x.L
    return x * L.scalar(_t(L.F)) + x**L.q


def _in_lambda_k(lam: ExtElem) -> bool:
    y = lam
    for _ in range(lam.L.k):
        y = apply_f(y)
    return y.is_zero()


def module_action(a: int, lam: ExtElem) -> ExtElem:
    """a . lambda = [a]_f(lambda) for an R-code ``a`` and lambda in Lambda_k."""
    L = lam.L
    if not _in_lambda_k(lam):
        raise DomainError("element is not annihilated by f^{k}; not in Lambda_k")
    out = L.zero()
    y = lam
    for j, c in enumerate(L.ring.digits(a)):
        if j:
            y = apply_f(y)
        if c:
            out = out + y.scale(c)
    return out


def order_of(lam: ExtElem) -> int:
    """Least m >= 0 with [t^m]_f(lambda) = f^{m}(lambda) = 0."""
    L = lam.L
    y = lam
    for m in range(L.k + 1):
        if y.is_zero():
            return m
        y = apply_f(y)
    raise DomainError("element is not annihilated by f^{k}; not in Lambda_k")
