"""Lubin-Tate module over F_q[[t]]: the iterates of f, the action [a]_f and its roots.

Run: python demos/lubin_tate_tour.py [q] [k]
"""

import sys

from kakeya_lab.checks import lt_selftest
from kakeya_lab.laurent import quotient_ring
from kakeya_lab.lubin_tate import (bracket_poly, build_extension, eisenstein_factor, iterate_f, newton_check,
                                   order_of, s_map)


def main(q: int = 2, k: int = 2):
    R = quotient_ring(q, k)
    print(f"f^{k} =", iterate_f(q, k).format())
    g = eisenstein_factor(q, k)
    print(f"g_{k} =", g.format(), f"(degree {g.degree}, roots of valuation {newton_check(g)})")

    print("\n[a]_f and its residue s_a:")
    for a in R.elements():
        print(f"  a = {R.format(a):<22} [a]_f = {bracket_poly(R, a).format():<32} s_a = {s_map(R, a).format()}")

    L = build_extension(q, k)
    print(f"\nL_N with N = {L.N}, e = {L.e}; zeta_1 = pi has order {order_of(L.zeta1)}")
    for a in R.elements():
        z = L.zeta(a)
        v = z.valuation() if not z.is_zero() else "inf"
        print(f"  zeta_{R.digit_string(a)} = {z.format():<40} v_L = {v}")

    rep = lt_selftest(q, k)
    print("\nself-test:")
    for c in rep.checks:
        print(f"  {'ok  ' if c.passed else 'FAIL'} {c.name} ({c.cases} cases)")


if __name__ == "__main__":
    main(*(int(x) for x in sys.argv[1:3]))
