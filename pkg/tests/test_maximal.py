from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kakeya_lab.errors import DomainError
from kakeya_lab.kakeya import line_points, rspace
from kakeya_lab.maximal import (CSV_HEADER, GridFunction, det_R, distribution, dyadic_decompose,
                                estimate_constants, is_invertible, lambda_grid, phi_star, random_phi,
                                random_rotation, rotation_cover, universal_lower_bound)


def brute_star(phi):
    sp = phi.space
    out = {}
    for w in sp.directions:
        best = 0.0
        for b in sp.points():
            s = sum(abs(phi.values[sp.flat(v)]) for v in line_points(sp, b, w))
            best = max(best, s / sp.Q)
        out[w] = best
    return out


def test_star_examples():
    sp = rspace(2, 1, 2)
    assert (phi_star(GridFunction(sp, np.ones(4))).values == 1).all()
    assert (phi_star(GridFunction(sp, np.zeros(4))).values == 0).all()
    star = phi_star(GridFunction.indicator(sp, [(0, 0), (1, 0)]))
    assert star.as_dict() == {(0, 1): 0.5, (1, 0): 1.0, (1, 1): 0.5}
    assert distribution(star, 1) == 1
    assert distribution(star, 0.5) == 3
    assert distribution(star, 1.01) == 0
    with pytest.raises(DomainError):
        distribution(star, 0)


@pytest.mark.parametrize("q,k,n", [(2, 2, 2), (3, 1, 2), (2, 1, 3)])
def test_star_matches_brute_force(q, k, n):
    sp = rspace(q, k, n)
    rng = np.random.default_rng(7)
    phi = GridFunction(sp, rng.random(sp.npoints) - 0.3)
    star = phi_star(phi)
    for w, v in brute_star(phi).items():
        assert star.at(w) == pytest.approx(v, abs=1e-12)


def grid_values(q, k, n, lo=0.0):
    sp = rspace(q, k, n)
    return st.lists(st.floats(lo, 10.0, allow_nan=False), min_size=sp.npoints, max_size=sp.npoints).map(
        lambda v: GridFunction(sp, np.array(v)))


@given(grid_values(2, 2, 2), grid_values(2, 2, 2), st.floats(0, 5))
def test_star_homogeneous_and_subadditive(phi, psi, c):
    a, b = phi_star(phi).values, phi_star(psi).values
    assert np.allclose(phi_star(phi * c).values, c * a)
    assert (phi_star(phi + psi).values <= a + b + 1e-9).all()


@given(st.sampled_from([(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 3)]).flatmap(lambda p: grid_values(*p)))
def test_universal_lower_bound(phi):
    star = phi_star(phi)
    assert star.values.min() >= universal_lower_bound(phi) * (1 - 1e-12)
    assert star.values.max() <= phi.norm(1) / phi.space.Q * (1 + 1e-12)


def test_dyadic_constant_function_sits_on_level_k():
    for q, k, n in [(2, 1, 2), (2, 2, 2), (3, 1, 2)]:
        sp = rspace(q, k, n)
        dec = dyadic_decompose(GridFunction(sp, np.full(sp.npoints, 0.7)))
        assert dec.nonempty_levels() == [k]
        assert np.allclose(dec.psi.values, dec.norm * float(q) ** (-k))


def test_dyadic_boundaries_are_closed_above():
    sp = rspace(2, 2, 1)  # n = 1, so ||phi|| is the plain sum
    dec = dyadic_decompose(GridFunction(sp, [1.0, 1.0, 2.0, 0.0]))
    assert dec.norm == 4.0
    assert dec.level_index.tolist() == [2, 2, 1, -1]
    assert dec.nonempty_levels() == [1, 2]


def test_dyadic_errors():
    sp = rspace(2, 1, 2)
    with pytest.raises(DomainError):
        dyadic_decompose(GridFunction(sp, np.zeros(4)))
    with pytest.raises(DomainError):
        dyadic_decompose(GridFunction(sp, [1.0, -1.0, 0.0, 0.0]))


@given(st.sampled_from([(2, 1, 2), (2, 2, 2), (3, 1, 2)]).flatmap(lambda p: grid_values(*p)))
def test_dyadic_properties(phi):
    if phi.norm_pow() == 0:
        return
    dec = dyadic_decompose(phi)
    q = phi.space.q
    assert dec.phi_D.norm() > (1 - 2 * float(q) ** -phi.space.k) * phi.norm()
    on = dec.phi_D.values > 0
    assert (dec.psi.values[on] / q < dec.phi_D.values[on]).all()
    assert (dec.phi_D.values[on] <= dec.psi.values[on] * (1 + 1e-12)).all()
    s_D, s_psi = phi_star(dec.phi_D).values, phi_star(dec.psi).values
    live = s_D > 0
    assert (s_psi[live] / q < s_D[live]).all()
    assert (s_D <= s_psi * (1 + 1e-12)).all()


@pytest.mark.parametrize("q,k", [(3, 3), (5, 2)])
def test_truncation_keeps_nine_tenths_when_q_k_is_large(q, k):
    sp = rspace(q, k, 2)
    rng = np.random.default_rng(q * 10 + k)
    for kind in ("dense", "sparse", "indicator", "lines", "kakeya"):
        for _ in range(4):
            phi = random_phi(sp, kind, rng)
            phi = GridFunction(sp, phi.values ** rng.integers(1, 6))
            if phi.norm_pow():
                assert dyadic_decompose(phi).phi_D.norm() > 0.9 * phi.norm()


def test_truncation_can_lose_more_than_a_tenth_when_q_k_is_small():
    phi = GridFunction(rspace(2, 1, 2), [0.0, 0.0, 3.0, 6.0])
    dec = dyadic_decompose(phi)
    assert dec.phi_D.values.tolist() == [0.0, 0.0, 0.0, 6.0]
    assert dec.phi_D.norm() < 0.9 * phi.norm()
    assert dec.phi_D.norm() > (1 - 2 / 2) * phi.norm()


def test_invertible_count_over_F2():
    sp = rspace(2, 1, 2)
    mats = [((a, b), (c, d)) for a, b, c, d in product(range(2), repeat=4)]
    assert sum(is_invertible(sp, M) for M in mats) == 6
    assert det_R(sp, ((1, 0), (0, 1))) == 1


def test_rotation_sampler():
    sp = rspace(2, 2, 2)
    attempts = []
    for seed in range(300):
        M, a = random_rotation(2, 2, 2, seed)
        assert is_invertible(sp, M)
        attempts.append(a)
        dmap = sp.matrix_direction_map(M)
        assert sorted(dmap.tolist()) == list(range(sp.ndirections))
    # acceptance probability over R = F_2[t]/t^2 equals the one over F_2: 6/16
    assert np.mean(attempts) == pytest.approx(16 / 6, rel=0.2)
    assert random_rotation(2, 2, 2, 11) == random_rotation(2, 2, 2, 11)


def test_rotation_cover_contains_images():
    sp = rspace(3, 1, 2)
    cov = rotation_cover(sp, [0, 1], 3, seed=4, E=[(0, 0), (1, 0)])
    assert len(cov.matrices) == 3
    for M in cov.matrices:
        assert set(sp.matrix_direction_map(M)[[0, 1]].tolist()) <= set(cov.omega.tolist())
    assert (0, 0) in cov.E


@given(st.integers(0, 2**32 - 1), grid_values(3, 1, 2))
def test_rotation_preserves_norm(seed, phi):
    M, _ = random_rotation(2, 1, 3, seed)
    assert phi.compose_matrix(M).norm() == pytest.approx(phi.norm())


def test_full_space_ratio_examples():
    for k in (1, 2, 3):
        sp = rspace(2, k, 2)
        phi = GridFunction(sp, np.ones(sp.npoints))
        star = phi_star(phi)
        lhs = distribution(star, 1)
        assert lhs == sp.ndirections
        assert phi.norm_pow() == sp.npoints
        assert lhs / (k**3 * phi.norm_pow()) <= 1


def test_below_lower_bound_counts_every_direction():
    sp = rspace(2, 2, 2)
    rng = np.random.default_rng(0)
    for kind in ("dense", "sparse", "indicator", "lines", "kakeya"):
        phi = random_phi(sp, kind, rng)
        if phi.norm_pow() == 0:
            continue
        star = phi_star(phi)
        assert distribution(star, universal_lower_bound(phi) * 0.999) == sp.ndirections


def test_lambda_grid():
    sp = rspace(2, 2, 2)
    star = phi_star(GridFunction(sp, np.ones(16)))
    assert lambda_grid(sp, star) == [1.0, 0.5, 0.25, 0.125, 0.0625]
    assert lambda_grid(sp, phi_star(GridFunction(sp, np.zeros(16)))) == []


def test_estimate_constants_table():
    t = estimate_constants(2, [1, 2], 2, 20, seed=3)
    assert t.trials_per_k == {1: 20, 2: 20}
    assert t.lower_bound_failures == 0
    assert set(t.max_ratio_by_k()) == {1, 2}
    assert all(len(r) == len(CSV_HEADER) for r in t.csv_rows())
    again = estimate_constants(2, [2], 2, 20, seed=3)
    assert again.max_ratio_by_k()[2] == t.max_ratio_by_k()[2]
    assert t.summary()["rng"] == "PCG64"
