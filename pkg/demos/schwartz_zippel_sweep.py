"""Counting zeros of high X-adic order on C^n = {s_a}^n and comparing with the lemma's bound.

Run: python demos/schwartz_zippel_sweep.py
"""

from fractions import Fraction

import numpy as np

from kakeya_lab.galois import FqPoly, field
from kakeya_lab.polymethod import BCoeffs, MultiPoly, exhaustive_sweep, random_poly, random_sweep, sz_verify


def main():
    F = field(2)
    B = BCoeffs(F)
    z = MultiPoly.variable(1, B, 0)
    for f in (z, z * z + MultiPoly.constant(1, B, FqPoly(F, [0, 1])), z**3 + z):
        rep = sz_verify(f, 1, 2)
        print(f"{rep.f:<22} count {rep.count} < bound {rep.bound}: {rep.status}")

    sw = exhaustive_sweep(2, 2, 1, 3, 2, (Fraction(1, 2), 1))
    print(f"\nexhaustive sweep (q=2, k=2, n=1, deg <= 3, coefficients of X-degree <= 2): "
          f"{sw.cases} cases, {len(sw.violations)} violations, max count/bound {sw.max_count_ratio:.3f}")

    print("\nrandom sweeps, 200 polynomials each:")
    for q, k, n in [(2, 2, 2), (3, 2, 1), (2, 3, 2), (3, 2, 2)]:
        sw = random_sweep(q, k, n, 200, seed=[q, k, n])
        print(f"  q={q} k={k} n={n}: {sw.cases} cases, {len(sw.violations)} violations, "
              f"max count/bound {sw.max_count_ratio:.3f}")

    rng = np.random.default_rng(1)
    f = random_poly(3, 2, 2, rng)
    print("\nsample random f over F_3[X]:", f.format())
    print(sz_verify(f, Fraction(1, 2), 2).to_json())


if __name__ == "__main__":
    main()
