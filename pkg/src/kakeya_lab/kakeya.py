"""Lines, direction profiles and the covering bound in R^n, R = F_q[t]/(t^k).

Points are tuples of R-codes.  An :class:`RSpace` fixes ``(q, k, n)`` and
indexes points in lexicographic order (first coordinate most significant), so
the flat index of a point doubles as its lexicographic rank.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, floor
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .laurent import QuotientRing, count_primitive, quotient_ring
from .rng import make_rng

DEFAULT_SPACE_BUDGET = 1 << 16


def as_fraction(x) -> Fraction:
    """Exact rational for ints, Fractions and decimal-looking floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class RSpace:
    """The module R^n with cached point/direction tables."""

    def __init__(self, q: int, k: int, n: int, budget: int = DEFAULT_SPACE_BUDGET):
        if n < 1:
            raise DomainError("n must be positive")
        self.q, self.k, self.n = q, k, n
        self.ring: QuotientRing = quotient_ring(q, k)
        self.Q = q**k
        self.npoints = self.Q**n
        if self.npoints > budget:
            raise ResourceError(f"|R^n| = {self.npoints} exceeds budget {budget}")
        idx = np.arange(self.npoints)
        self.coords = np.stack([(idx // self.Q ** (n - 1 - i)) % self.Q for i in range(n)], axis=1)
        self._weights = np.array([self.Q ** (n - 1 - i) for i in range(n)], dtype=np.int64)
        prim = np.any(self.coords % q != 0, axis=1)
        self.direction_flat = np.nonzero(prim)[0]
        self.directions: list[tuple[int, ...]] = [tuple(int(x) for x in self.coords[i]) for i in self.direction_flat]
        self.direction_index = {w: d for d, w in enumerate(self.directions)}
        if len(self.directions) != count_primitive(k, n, q):
            raise AssertionError("primitive count mismatch")

    def __repr__(self):
        return f"RSpace(q={self.q}, k={self.k}, n={self.n})"

    def __reduce__(self):
        return (rspace, (self.q, self.k, self.n))

    @property
    def ndirections(self) -> int:
        return len(self.directions)

    def flat(self, v: Sequence[int]) -> int:
        out = 0
        for x in v:
            out = out * self.Q + x
        return out

    def point(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.coords[i])

    def points(self) -> list[tuple[int, ...]]:
        return [self.point(i) for i in range(self.npoints)]

    def _flat_array(self, coords: np.ndarray) -> np.ndarray:
        return coords @ self._weights

    def translate_scaled(self, a: int, w: Sequence[int]) -> np.ndarray:
        """Flat indices of ``v + a*w`` for every point v."""
        R = self.ring
        shift = np.array([R.mul(a, x) for x in w], dtype=np.int64)
        moved = R.add_array[self.coords, shift[None, :]]
        return self._flat_array(moved)

    @cached_property
    def labels(self) -> np.ndarray:
        """``labels[d, v]`` = flat index of the least point on the line through v in direction d."""
        out = np.empty((self.ndirections, self.npoints), dtype=np.int64)
        for d, w in enumerate(self.directions):
            lab = np.full(self.npoints, self.npoints, dtype=np.int64)
            for a in range(self.Q):
                np.minimum(lab, self.translate_scaled(a, w), out=lab)
            out[d] = lab
        return out

    def unit_normal_form(self, w: Sequence[int]) -> tuple[int, ...]:
        """Lexicographically least unit multiple of ``w``."""
        R = self.ring
        return min(tuple(R.mul(u, x) for x in w) for u in R.units)

    @cached_property
    def direction_classes(self) -> list[list[int]]:
        """Direction indices grouped by unit multiples (same lines)."""
        groups: dict[tuple[int, ...], list[int]] = {}
        for d, w in enumerate(self.directions):
            groups.setdefault(self.unit_normal_form(w), []).append(d)
        return list(groups.values())

    def line(self, base: Sequence[int], w: Sequence[int]) -> "RLine":
        return RLine(self, tuple(base), tuple(w))

    def lines_in_direction(self, d: int) -> list[np.ndarray]:
        lab = self.labels[d]
        return [np.nonzero(lab == b)[0] for b in np.unique(lab)]

    def mask(self, E: Iterable[Sequence[int]] | np.ndarray) -> np.ndarray:
        """Boolean membership mask over flat indices."""
        if isinstance(E, np.ndarray) and E.dtype == bool:
            if E.shape != (self.npoints,):
                raise DomainError("mask has the wrong shape")
            return E
        m = np.zeros(self.npoints, dtype=bool)
        for v in E:
            if len(v) != self.n:
                raise DomainError(f"point {v!r} is not in R^{self.n}")
            m[self.flat(v)] = True
        return m

    def set_from_mask(self, m: np.ndarray) -> frozenset[tuple[int, ...]]:
        return frozenset(self.point(int(i)) for i in np.nonzero(m)[0])

    # --- linear maps -----------------------------------------------------

    def apply_matrix_coords(self, M: Sequence[Sequence[int]], coords: np.ndarray) -> np.ndarray:
        R = self.ring
        M = np.asarray(M, dtype=np.int64)
        out = np.zeros_like(coords)
        for i in range(self.n):
            acc = np.zeros(len(coords), dtype=np.int64)
            for j in range(self.n):
                acc = R.add_array[acc, R.mul_array[M[i, j], coords[:, j]]]
            out[:, i] = acc
        return out

    def matrix_permutation(self, M: Sequence[Sequence[int]]) -> np.ndarray:
        """``perm[v] = M v`` on flat indices."""
        return self._flat_array(self.apply_matrix_coords(M, self.coords))

    def matrix_direction_map(self, M: Sequence[Sequence[int]]) -> np.ndarray:
        """``dmap[d]`` = index of the direction ``M w_d`` (M must be invertible)."""
        perm = self.matrix_permutation(M)
        lookup = np.full(self.npoints, -1, dtype=np.int64)
        lookup[self.direction_flat] = np.arange(self.ndirections)
        dmap = lookup[perm[self.direction_flat]]
        if (dmap < 0).any():
            raise DomainError("matrix does not preserve primitivity; not invertible over R")
        return dmap


@lru_cache(maxsize=16)
def rspace(q: int, k: int, n: int) -> RSpace:
    return RSpace(q, k, n)


@dataclass(frozen=True)
class RLine:
    """The line ``{b + a w : a in R}`` with ``w`` primitive."""

    space: RSpace = dc_field(compare=False, repr=False)
    base: tuple[int, ...]
    direction: tuple[int, ...]

    def __post_init__(self):
        if not self.space.ring.is_primitive(self.direction):
            raise DomainError(f"direction {self.direction} is not primitive")

    def points(self) -> frozenset[tuple[int, ...]]:
        R = self.space.ring
        return frozenset(
            tuple(R.add(b, R.mul(a, x)) for b, x in zip(self.base, self.direction)) for a in R.elements()
        )

    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Deduplication key: (least point, least unit multiple of the direction)."""
        return (min(self.points()), self.space.unit_normal_form(self.direction))


def line_points(space: RSpace, base: Sequence[int], w: Sequence[int]) -> frozenset[tuple[int, ...]]:
    return RLine(space, tuple(base), tuple(w)).points()


def all_lines(space: RSpace) -> set[tuple]:
    """Distinct line keys of R^n."""
    keys = set()
    for cls in space.direction_classes:
        d = cls[0]
        for lab in np.unique(space.labels[d]):
            keys.add((space.point(int(lab)), space.unit_normal_form(space.directions[d])))
    return keys


@dataclass
class KakeyaProfile:
    """Per-direction maximum of ``|line ∩ E|`` with a maximizing line."""

    space: RSpace
    counts: np.ndarray
    best_base: np.ndarray  # flat index of the least point of a maximizing line
    size: int

    def epsilon_per_direction(self) -> np.ndarray:
        return self.counts / self.space.Q

    def omega(self, eps) -> np.ndarray:
        """Directions having a line that meets E in at least ``eps * q^k`` points."""
        need = as_fraction(eps) * self.space.Q
        return np.nonzero(self.counts >= need)[0]

    def nu(self, eps) -> Fraction:
        """``|Omega_eps| / q^{kn}`` (normalization as in the Kakeya definition)."""
        return Fraction(len(self.omega(eps)), self.space.npoints)

    def is_kakeya(self, eps, nu) -> bool:
        return len(self.omega(eps)) >= as_fraction(nu) * self.space.npoints

    def best_line(self, d: int) -> RLine:
        return self.space.line(self.space.point(int(self.best_base[d])), self.space.directions[d])

    def nu_at_threshold(self, eps) -> float:
        return float(self.nu(eps))


def profile(space: RSpace, E) -> KakeyaProfile:
    m = space.mask(E)
    idx = np.nonzero(m)[0]
    nd, npts = space.ndirections, space.npoints
    if len(idx) == 0:
        return KakeyaProfile(space, np.zeros(nd, dtype=np.int64), np.zeros(nd, dtype=np.int64), 0)
    lab = space.labels[:, idx] + (np.arange(nd, dtype=np.int64) * npts)[:, None]
    table = np.bincount(lab.ravel(), minlength=nd * npts).reshape(nd, npts)
    return KakeyaProfile(space, table.max(axis=1), table.argmax(axis=1), int(len(idx)))


def covering_bound(eps, nu, k: int, n: int, q: int) -> int:
    """C(beta + n, n) with beta = floor(nu * eps * q^{k-1} / (k n))."""
    return comb(covering_beta(eps, nu, k, n, q) + n, n)


def covering_beta(eps, nu, k: int, n: int, q: int) -> int:
    eps, nu = as_fraction(eps), as_fraction(nu)
    if not (0 < eps <= 1 and 0 < nu <= 1):
        raise DomainError("eps and nu must lie in (0, 1]")
    return floor(nu * eps * q ** (k - 1) / (k * n))


@dataclass
class CoveringReport:
    q: int
    k: int
    n: int
    epsilon: Fraction
    nu: Fraction
    size: int
    beta: int
    bound: int
    omega_size: int
    hypothesis_met: bool
    status: str  # "pass", "hypothesis not met", "THEOREM VIOLATION"
    epsilon_per_direction: list[float]

    @property
    def passed(self) -> bool | None:
        if not self.hypothesis_met:
            return None
        return self.status == "pass"

    def to_json(self) -> dict:
        return {
            "q": self.q, "k": self.k, "n": self.n,
            "epsilon": str(self.epsilon), "nu": str(self.nu),
            "epsilon_per_direction": self.epsilon_per_direction,
            "nu_at_threshold": str(Fraction(self.omega_size, self.q ** (self.k * self.n))),
            "omega_size": self.omega_size,
            "beta": self.beta, "bound": self.bound, "size": self.size,
            "hypothesis_met": self.hypothesis_met,
            "status": self.status, "pass": self.passed,
        }


def check_covering_theorem(space: RSpace, E, eps, nu) -> CoveringReport:
    """Compare |E| with the covering bound when E is (eps, nu)-Kakeya modulo t^k."""
    eps, nu = as_fraction(eps), as_fraction(nu)
    prof = profile(space, E)
    omega = prof.omega(eps)
    met = len(omega) >= nu * space.npoints
    beta = covering_beta(eps, nu, space.k, space.n, space.q)
    bound = comb(beta + space.n, space.n)
    if not met:
        status = "hypothesis not met"
    elif prof.size >= bound:
        status = "pass"
    else:
        status = "THEOREM VIOLATION"
    return CoveringReport(space.q, space.k, space.n, eps, nu, prof.size, beta, bound, len(omega), met,
                          status, [float(x) for x in prof.epsilon_per_direction()])


def greedy_small_kakeya(k: int, n: int, q: int, seed: int = 0, space: RSpace | None = None) -> frozenset:
    """A set containing a full line in every primitive direction, built greedily.

    Directions are visited in a seeded random order; each missing direction
    gets the parallel line that already shares the most points with the set
    (ties broken by the seeded generator).
    """
    sp = space or rspace(q, k, n)
    rng = make_rng(seed)
    m = np.zeros(sp.npoints, dtype=bool)
    for d in rng.permutation(sp.ndirections):
        lab = sp.labels[d]
        counts = np.bincount(lab, weights=m.astype(np.int64), minlength=sp.npoints)
        present = np.bincount(lab, minlength=sp.npoints)
        if counts.max() >= sp.Q:
            continue
        counts = np.where(present > 0, counts, -1)
        best = np.nonzero(counts == counts.max())[0]
        chosen = int(best[rng.integers(len(best))])
        m |= lab == chosen
    return sp.set_from_mask(m)


def exhaustive_min_kakeya(k: int, n: int, q: int, budget: int = 16) -> tuple[int, frozenset]:
    """Minimum size of a set with a full line in every primitive direction, with a witness.

    Branch and bound over direction classes: each class must receive one of
    its parallel lines; the bound is the current size plus the largest, over
    unsatisfied classes, of the cheapest completion.
    """
    if q ** (k * n) > budget:
        raise ResourceError(f"|R^n| = {q ** (k * n)} exceeds min-Kakeya budget {budget}")
    sp = rspace(q, k, n)
    classes = []
    for cls in sp.direction_classes:
        masks = []
        for pts in sp.lines_in_direction(cls[0]):
            bits = 0
            for i in pts:
                bits |= 1 << int(i)
            masks.append(bits)
        classes.append(masks)
    full = (1 << sp.npoints) - 1
    best = [sp.npoints, full]

    def search(S: int, size: int):
        options = []
        for masks in classes:
            if any(ln & ~S == 0 for ln in masks):
                continue
            costs = sorted(((ln & ~S).bit_count(), ln) for ln in masks)
            options.append(costs)
        if not options:
            if size < best[0]:
                best[0], best[1] = size, S
            return
        worst = max(options, key=lambda c: c[0][0])
        if size + worst[0][0] >= best[0]:
            return
        for cost, ln in worst:
            if size + cost >= best[0]:
                break
            search(S | ln, size + cost)

    search(0, 0)
    witness = frozenset(sp.point(i) for i in range(sp.npoints) if best[1] >> i & 1)
    return best[0], witness


def is_full_kakeya(space: RSpace, E) -> bool:
    """True iff E contains a full line in every primitive direction."""
    return bool((profile(space, E).counts == space.Q).all())


# --- point-set files ------------------------------------------------------------


def format_points(space: RSpace, E: Iterable[Sequence[int]]) -> str:
    R = space.ring
    lines = [",".join(R.digit_string(x) for x in v) for v in sorted(E)]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_points(space: RSpace, text: str) -> frozenset[tuple[int, ...]]:
    R = space.ring
    out = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        parts = raw.split(",")
        if len(parts) != space.n:
            raise DomainError(f"line {lineno}: expected {space.n} coordinates, got {len(parts)}")
        out.add(tuple(R.parse_digits(p) for p in parts))
    return frozenset(out)


def write_points(path, space: RSpace, E) -> None:
    Path(path).write_text(format_points(space, E))


def read_points(path, space: RSpace) -> frozenset[tuple[int, ...]]:
    return parse_points(space, Path(path).read_text())
