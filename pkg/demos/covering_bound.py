"""Small Kakeya sets modulo t^k and the binomial covering bound.

Run: python demos/covering_bound.py
"""

from fractions import Fraction

from kakeya_lab.kakeya import (check_covering_theorem, covering_bound, exhaustive_min_kakeya, format_points,
                               greedy_small_kakeya, profile, rspace)


def main():
    print("exact minimum sizes of sets with a full line in every direction:")
    for q, k, n in [(2, 1, 1), (2, 1, 2), (3, 1, 2), (2, 2, 2)]:
        size, witness = exhaustive_min_kakeya(k, n, q)
        bound = covering_bound(1, 1 - Fraction(1, q**n), k, n, q)
        print(f"  q={q} k={k} n={n}: minimum {size} (bound {bound})")
        if q ** (k * n) <= 9:
            print("    " + format_points(rspace(q, k, n), witness).strip().replace("\n", "  "))

    print("\ngreedy sets against the bound at eps = 1:")
    for q, k in [(2, 2), (2, 3), (3, 2), (3, 3)]:
        sp = rspace(q, k, 2)
        sizes = [len(greedy_small_kakeya(k, 2, q, seed=s, space=sp)) for s in range(10)]
        E = greedy_small_kakeya(k, 2, q, seed=0, space=sp)
        rep = check_covering_theorem(sp, E, 1, profile(sp, E).nu(1))
        print(f"  q={q} k={k}: |R^2| = {sp.npoints}, greedy sizes {min(sizes)}..{max(sizes)}, "
              f"nu = {rep.nu}, bound {rep.bound}: {rep.status}")

    print("\nbound growth with k at eps = nu = 1 (q=2, n=2):")
    print("  " + ", ".join(f"k={k}: {covering_bound(1, 1, k, 2, 2)}" for k in range(1, 13)))


if __name__ == "__main__":
    main()
