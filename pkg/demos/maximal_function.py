"""The discrete Kakeya maximal function and its empirical distributional constants.

Run: python demos/maximal_function.py
"""

import numpy as np

from kakeya_lab.kakeya import greedy_small_kakeya, rspace
from kakeya_lab.maximal import (GridFunction, distribution, dyadic_decompose, estimate_constants, phi_star,
                                universal_lower_bound)


def main():
    sp = rspace(2, 1, 2)
    star = phi_star(GridFunction.indicator(sp, [(0, 0), (1, 0)]))
    print("phi* of a single line:", star.as_dict())
    print("distribution at 1 and 1/2:", distribution(star, 1), distribution(star, 0.5))

    sp = rspace(3, 2, 2)
    E = greedy_small_kakeya(2, 2, 3, seed=0, space=sp)
    phi = GridFunction.indicator(sp, E)
    star = phi_star(phi)
    print(f"\nKakeya indicator (q=3, k=2): |E| = {len(E)}, min phi* = {star.values.min():.3f}, "
          f"lower bound {universal_lower_bound(phi):.3f}")

    rng = np.random.default_rng(0)
    dec = dyadic_decompose(GridFunction(sp, rng.random(sp.npoints) ** 4))
    print(f"dyadic levels of a random phi: {dec.nonempty_levels()}, "
          f"kept norm fraction {dec.phi_D.norm() / dec.norm:.4f}")

    table = estimate_constants(2, [1, 2, 3], 2, 100, seed=0)
    print("\nmax |{phi* >= lambda}| / (k^3 lambda^-2 ||phi||^2) per k:", table.max_ratio_by_k())
    print("max ||phi*||^2 / (k^4 ||phi||^2) per k:", table.max_norm_ratio_by_k())
    print("universal lower bound failures:", table.lower_bound_failures)


if __name__ == "__main__":
    main()
