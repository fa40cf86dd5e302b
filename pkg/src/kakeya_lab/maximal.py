"""The discrete Kakeya maximal function and its empirical estimates.

For ``phi : R^n -> R`` the maximal function on primitive directions is

    phi*(w) = max over lines l parallel to w of  q^{-k} * sum_{v in l} |phi(v)|.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .kakeya import RSpace, greedy_small_kakeya, rspace
from .rng import RNG_NAME, make_rng

LOWER_BOUND_RTOL = 1e-12


@dataclass
class GridFunction:
    """A real function on R^n stored densely by flat point index."""

    space: RSpace
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.space.npoints,):
            raise DomainError("values must have one entry per point of R^n")

    @classmethod
    def indicator(cls, space: RSpace, E) -> "GridFunction":
        return cls(space, space.mask(E).astype(float))

    def norm(self, p: float | None = None) -> float:
        """ell^p norm; ``p`` defaults to n."""
        p = self.space.n if p is None else p
        return float(np.sum(np.abs(self.values) ** p) ** (1.0 / p))

    def norm_pow(self) -> float:
        """``||phi||_{ell^n}^n``."""
        return float(np.sum(np.abs(self.values) ** self.space.n))

    def compose_matrix(self, M) -> "GridFunction":
        """``phi o M`` for an invertible matrix M over R."""
        return GridFunction(self.space, self.values[self.space.matrix_permutation(M)])

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.space, self.values + other.values)

    def __mul__(self, c: float) -> "GridFunction":
        return GridFunction(self.space, self.values * c)

    __rmul__ = __mul__


@dataclass
class StarFunction:
    """Values of phi* indexed like ``space.directions``."""

    space: RSpace
    values: np.ndarray

    def at(self, w: Sequence[int]) -> float:
        return float(self.values[self.space.direction_index[tuple(w)]])

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {w: float(v) for w, v in zip(self.space.directions, self.values)}


def _line_sums(space: RSpace, weights: np.ndarray) -> np.ndarray:
    nd, npts = space.ndirections, space.npoints
    lab = space.labels + (np.arange(nd, dtype=np.int64) * npts)[:, None]
    w = np.broadcast_to(weights, lab.shape)
    return np.bincount(lab.ravel(), weights=w.ravel(), minlength=nd * npts).reshape(nd, npts)


def phi_star(phi: GridFunction) -> StarFunction:
    """Exact maximum over all parallel lines, for every primitive direction."""
    sp = phi.space
    sums = _line_sums(sp, np.abs(phi.values))
    return StarFunction(sp, sums.max(axis=1) / sp.Q)


def distribution(star: StarFunction, lam: float) -> int:
    """``|{w in S^{n-1}(R) : phi*(w) >= lam}|``."""
    if lam <= 0:
        raise DomainError("lambda must be positive")
    return int(np.count_nonzero(star.values >= lam))


def universal_lower_bound(phi: GridFunction) -> float:
    """``q^{-k(2-1/n)} ||phi||_{ell^n}``, a lower bound for every value of phi*."""
    sp = phi.space
    return float(sp.q) ** (-sp.k * (2 - 1 / sp.n)) * phi.norm()


@dataclass
class DyadicDecomposition:
    phi_D: GridFunction
    levels: list[GridFunction]  # psi_0 .. psi_{2k-1}
    psi: GridFunction
    norm: float
    level_index: np.ndarray  # j for points of D, -1 elsewhere

    def nonempty_levels(self) -> list[int]:
        return sorted(set(int(j) for j in self.level_index if j >= 0))


def dyadic_decompose(phi: GridFunction) -> DyadicDecomposition:
    """Truncate small values and bucket the rest into q-adic level sets.

    ``D = {phi >= 2 q^{-2k} ||phi||}``; for ``0 <= j < 2k``,
    ``E_j = {q^{-j-1}||phi|| < phi_D <= q^{-j}||phi||}`` (open below, closed
    above) and ``psi_j = q^{-j}||phi|| 1_{E_j}``.  Comparisons are done on n-th
    powers against ``sum phi^n`` so exact inputs hit the boundaries exactly.
    """
    sp = phi.space
    q, k, n = sp.q, sp.k, sp.n
    vals = phi.values
    if (vals < 0).any():
        raise DomainError("dyadic decomposition needs phi >= 0")
    total = float(np.sum(vals**n))
    if total == 0:
        raise DomainError("dyadic decomposition of the zero function")
    norm = total ** (1.0 / n)
    powers = vals**n
    in_D = powers * float(q) ** (2 * k * n) >= 2.0**n * total
    phi_D = np.where(in_D, vals, 0.0)
    level_index = np.full(sp.npoints, -1, dtype=np.int64)
    levels = []
    for j in range(2 * k):
        upper = powers * float(q) ** (j * n) <= total
        lower = powers * float(q) ** ((j + 1) * n) > total
        E_j = in_D & upper & lower
        level_index[E_j] = j
        levels.append(GridFunction(sp, np.where(E_j, float(q) ** (-j) * norm, 0.0)))
    if ((level_index >= 0) != in_D).any():
        raise AssertionError("level sets do not cover D")
    psi = GridFunction(sp, np.sum([lv.values for lv in levels], axis=0))
    return DyadicDecomposition(GridFunction(sp, phi_D), levels, psi, norm, level_index)


# --- random rotations ------------------------------------------------------------


def det_R(space: RSpace, M: Sequence[Sequence[int]]) -> int:
    """Determinant over R (Leibniz formula; n is small)."""
    R = space.ring
    n = len(M)
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = 1
        for i in range(n):
            term = R.mul(term, M[i][perm[i]])
        total = R.sub(total, term) if inversions % 2 else R.add(total, term)
    return total


def is_invertible(space: RSpace, M) -> bool:
    return space.ring.is_unit(det_R(space, M))


def random_rotation(n: int, k: int, q: int, seed=0, budget: int = 10_000):
    """Uniform element of GL_n(R) by rejection from uniform entries.

    Returns ``(matrix, attempts)``; ``seed`` may also be a numpy Generator.
    """
    sp = rspace(q, k, n)
    rng = make_rng(seed)
    for attempt in range(1, budget + 1):
        M = tuple(tuple(int(x) for x in row) for row in rng.integers(0, sp.Q, size=(n, n)))
        if is_invertible(sp, M):
            return M, attempt
    raise ResourceError(f"no invertible matrix in {budget} draws")


@dataclass
class RotationCover:
    matrices: list
    omega: np.ndarray  # direction indices
    E: frozenset | None


def rotation_cover(space: RSpace, omega: Iterable[int], m: int, seed=0, E=None) -> RotationCover:
    """Union of the images of a direction set (and optionally a point set) under m random rotations."""
    rng = make_rng(seed)
    omega = np.asarray(sorted(set(int(d) for d in omega)), dtype=np.int64)
    out_dirs = np.zeros(space.ndirections, dtype=bool)
    out_pts = np.zeros(space.npoints, dtype=bool)
    mask = space.mask(E) if E is not None else None
    mats = []
    for _ in range(m):
        M, _ = random_rotation(space.n, space.k, space.q, rng)
        mats.append(M)
        out_dirs[space.matrix_direction_map(M)[omega]] = True
        if mask is not None:
            out_pts[space.matrix_permutation(M)[mask]] = True
    return RotationCover(mats, np.nonzero(out_dirs)[0], space.set_from_mask(out_pts) if E is not None else None)


# --- empirical constants ------------------------------------------------------------


PHI_KINDS = ("dense", "sparse", "indicator", "lines", "kakeya")


def random_phi(space: RSpace, kind: str, rng: np.random.Generator) -> GridFunction:
    N = space.npoints
    if kind == "dense":
        return GridFunction(space, rng.random(N))
    if kind == "sparse":
        vals = np.zeros(N)
        support = rng.choice(N, size=int(rng.integers(1, max(2, N // 8) + 1)), replace=False)
        vals[support] = rng.random(len(support)) + 0.01
        return GridFunction(space, vals)
    if kind == "indicator":
        return GridFunction(space, (rng.random(N) < rng.random()).astype(float))
    if kind == "lines":
        vals = np.zeros(N, dtype=bool)
        for _ in range(int(rng.integers(1, space.n + 3))):
            d = int(rng.integers(space.ndirections))
            base = int(rng.integers(N))
            vals |= space.labels[d] == space.labels[d][base]
        return GridFunction(space, vals.astype(float))
    if kind == "kakeya":
        E = greedy_small_kakeya(space.k, space.n, space.q, rng, space=space)
        return GridFunction.indicator(space, E)
    raise DomainError(f"unknown phi kind {kind!r}")


def lambda_grid(space: RSpace, star: StarFunction) -> list[float]:
    """Geometric grid ``max(phi*) * q^{-j}``, j = 0..2k."""
    top = float(star.values.max())
    if top <= 0:
        return []
    return [top * float(space.q) ** (-j) for j in range(2 * space.k + 1)]


@dataclass
class ConstantsTable:
    q: int
    n: int
    seed: int
    rows: list[dict]  # distribution rows: q, k, n, lambda, lhs, rhs, ratio, seed
    norm_rows: list[dict]
    lower_bound_failures: int
    trials_per_k: dict[int, int]

    def max_ratio_by_k(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for r in self.rows:
            out[r["k"]] = max(out.get(r["k"], 0.0), r["ratio"])
        return out

    def max_norm_ratio_by_k(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for r in self.norm_rows:
            out[r["k"]] = max(out.get(r["k"], 0.0), r["ratio"])
        return out

    def summary(self) -> dict:
        return {
            "q": self.q, "n": self.n, "seed": self.seed, "rng": RNG_NAME,
            "trials_per_k": {str(k): v for k, v in self.trials_per_k.items()},
            "max_distribution_ratio_per_k": {str(k): v for k, v in self.max_ratio_by_k().items()},
            "max_norm_ratio_per_k": {str(k): v for k, v in self.max_norm_ratio_by_k().items()},
            "lower_bound_failures": self.lower_bound_failures,
        }

    def csv_rows(self) -> list[list]:
        return [[r["q"], r["k"], r["n"], repr(r["lambda"]), r["lhs"], repr(r["rhs"]), repr(r["ratio"]), r["seed"]]
                for r in self.rows]


CSV_HEADER = ["q", "k", "n", "lambda", "lhs", "rhs", "ratio", "seed"]


def _trial(space: RSpace, kind: str, rng: np.random.Generator, seed: int, trial: int):
    q, k, n = space.q, space.k, space.n
    phi = random_phi(space, kind, rng)
    if phi.norm_pow() == 0:
        phi = GridFunction(space, np.ones(space.npoints))
    star = phi_star(phi)
    normp = phi.norm_pow()
    rows = []
    for lam in lambda_grid(space, star):
        lhs = distribution(star, lam)
        rhs = k ** (n + 1) * lam ** (-n) * normp
        rows.append({"q": q, "k": k, "n": n, "lambda": lam, "lhs": lhs, "rhs": rhs,
                     "ratio": lhs / rhs, "seed": seed, "kind": kind, "trial": trial})
    norm_ratio = float(np.sum(star.values**n)) / (k ** (n + 2) * normp)
    lb = universal_lower_bound(phi)
    ok = float(star.values.min()) >= lb * (1 - LOWER_BOUND_RTOL)
    return rows, {"q": q, "k": k, "n": n, "ratio": norm_ratio, "seed": seed, "kind": kind, "trial": trial}, ok


def estimate_constants(q: int, k_range: Iterable[int], n: int, trials: int, seed: int = 0) -> ConstantsTable:
    """Distribution and L^n ratios of random phi, normalized by k^{n+1} and k^{n+2}.

    Trials cycle through the kinds in :data:`PHI_KINDS`.  One generator per k,
    seeded from ``(seed, k)``, so tables for different k ranges agree on the
    shared k.
    """
    rows, norm_rows, failures, counts = [], [], 0, {}
    for k in k_range:
        space = rspace(q, k, n)
        rng = make_rng([seed, k])
        for trial in range(trials):
            kind = PHI_KINDS[trial % len(PHI_KINDS)]
            r, nr, ok = _trial(space, kind, rng, seed, trial)
            rows.extend(r)
            norm_rows.append(nr)
            failures += not ok
        counts[k] = trials
    return ConstantsTable(q, n, seed, rows, norm_rows, failures, counts)
