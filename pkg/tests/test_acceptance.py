"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import json
from fractions import Fraction

import numpy as np
import pytest

from kakeya_lab.checks import commutation, eisenstein, module_structure, residue_is_s, series_agreement
from kakeya_lab.cli import run, strip_timing
from kakeya_lab.kakeya import covering_bound, exhaustive_min_kakeya, greedy_small_kakeya, profile, rspace
from kakeya_lab.lubin_tate import eisenstein_factor, newton_check
from kakeya_lab.maximal import GridFunction, distribution, estimate_constants, phi_star
from kakeya_lab.polymethod import (adversarial_instance, exhaustive_sweep, genuine_instance, proof_trace,
                                   random_sweep)
from kakeya_lab.rng import make_rng

GRID = [(q, k) for q in (2, 3) for k in (1, 2, 3)]


@pytest.fixture
def verdict(capsys):
    def emit(criterion: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_lubin_tate_selftest(verdict):
    failures = []
    for q, k in GRID:
        for name, fn in (("commutation", commutation), ("residue", residue_is_s), ("series", series_agreement)):
            ok, cases, detail = fn(q, k)
            if not ok:
                failures.append(f"{name} q={q} k={k}: {detail}")
    verdict(1, not failures, "commutation mod t^(k+2), residue = s_a and series agreement for q in {2,3}, "
            f"k in {{1,2,3}}; failures: {failures or 'none'}")


def test_criterion_2_module_structure(verdict):
    failures = []
    for q, k in GRID:
        ok, cases, detail = module_structure(q, k)
        if not ok:
            failures.append(f"q={q} k={k}: {detail}")
    verdict(2, not failures, f"orbit size q^k, additive closure, killed by f^k, order k; failures: {failures or 'none'}")


def test_criterion_3_eisenstein_newton(verdict):
    got = {}
    failures = []
    for q, k in GRID:
        e = q ** (k - 1) * (q - 1)
        v = newton_check(eisenstein_factor(q, k))
        got[(q, k)] = str(v)
        ok, _, detail = eisenstein(q, k)
        if not ok or v != Fraction(1, e):
            failures.append(f"q={q} k={k}: {detail}")
    verdict(3, not failures, f"root valuations {got}; failures: {failures or 'none'}")


def test_criterion_4_schwartz_zippel(verdict):
    ex = exhaustive_sweep(2, 2, 1, 3, 2, (Fraction(1, 2), Fraction(1)))
    sets = [(q, k, n) for q in (2, 3) for k in (1, 2, 3) for n in (1, 2)]
    per_set = -(-10_000 // len(sets))
    cases, bad = 0, []
    for q, k, n in sets:
        res = random_sweep(q, k, n, per_set, seed=[q, k, n])
        cases += res.cases
        bad.extend(res.violations)
    ok = ex.passed and not bad and cases >= 10_000
    verdict(4, ok, f"exhaustive {ex.cases} cases, {len(ex.violations)} violations; random {cases} cases over "
            f"{len(sets)} parameter sets, {len(bad)} violations")


def test_criterion_5_covering_on_instances(verdict):
    violations, checked = [], 0
    for q in (2, 3):
        for k in (1, 2, 3):
            sp = rspace(q, k, 2)
            for seed in range(20):
                E = greedy_small_kakeya(k, 2, q, seed=seed, space=sp)
                nu = profile(sp, E).nu(1)
                bound = covering_bound(1, nu, k, 2, q)
                checked += 1
                if len(E) < bound:
                    violations.append((q, k, seed, len(E), bound))
    size, witness = exhaustive_min_kakeya(1, 2, 2)
    bound = covering_bound(1, Fraction(3, 4), 1, 2, 2)
    ok = not violations and size == 4 and size >= bound
    verdict(5, ok, f"{checked} greedy sets, {len(violations)} covering violations; "
            f"exhaustive_min_kakeya(q=2,k=1,n=2) = {size} (criterion expects 4), bound {bound}, "
            f"witness {sorted(witness)}")


def test_criterion_6_proof_trace(verdict):
    sp = rspace(2, 2, 2)
    rng = make_rng(2024)
    genuine_stops = []
    for _ in range(50):
        E, eps, nu = genuine_instance(sp, rng)
        genuine_stops.append(proof_trace(E, eps, nu, 2, 2, 2).terminated_at)
    completed, unattributed, steps = 0, 0, {}
    for _ in range(50):
        inst = adversarial_instance(sp, rng)
        tr = proof_trace(inst["E"], inst["eps"], inst["nu"], 2, 2, 2, omega=inst["omega"], forced_degree=True)
        completed += tr.completed
        if not tr.completed:
            if tr.terminated_at is None or not tr.failure:
                unattributed += 1
            steps[tr.terminated_at] = steps.get(tr.terminated_at, 0) + 1
    ok = all(s == 1 for s in genuine_stops) and completed == 0 and unattributed == 0
    verdict(6, ok, f"genuine: {genuine_stops.count(1)}/50 stop at step 1; adversarial: {completed} completions, "
            f"{unattributed} unattributed, failing steps {dict(sorted(steps.items()))}")


def test_criterion_7_maximal_exactness(verdict):
    sp = rspace(2, 1, 2)
    star = phi_star(GridFunction.indicator(sp, [(0, 0), (1, 0)]))
    vals = (star.at((1, 0)), star.at((0, 1)), star.at((1, 1)))
    counts = (distribution(star, 1), distribution(star, 0.5))
    ok = vals == (1.0, 0.5, 0.5) and counts == (1, 3)
    verdict(7, ok, f"phi* on (1,0),(0,1),(1,1) = {vals}; counts at lambda 1, 1/2 = {counts}")


def test_criterion_8_maximal_estimates(verdict):
    table = estimate_constants(2, [1, 2, 3], 2, 200, seed=0)
    per_k = table.max_ratio_by_k()
    growth = per_k[3] / per_k[1]
    ok = growth <= 2 and table.lower_bound_failures == 0 and all(v == 200 for v in table.trials_per_k.values())
    verdict(8, ok, f"max distribution ratio per k {{{', '.join(f'{k}: {v:.4g}' for k, v in per_k.items())}}}, "
            f"growth k=1->3 {growth:.3g} (limit 2), overall max {max(per_k.values()):.4g}; "
            f"max norm ratio per k {{{', '.join(f'{k}: {v:.4g}' for k, v in table.max_norm_ratio_by_k().items())}}}; "
            f"lower-bound failures {table.lower_bound_failures}/600")


def test_criterion_9_determinism(verdict, tmp_path):
    pts = tmp_path / "line.pts"
    pts.write_text("00,00\n10,00\n01,00\n11,00\n")
    runs = {
        "lt-selftest": ["--q", "3", "--k", "1-2"],
        "sz-verify": ["--q", "2", "--k", "2", "--n", "2", "--random", "300"],
        "covering": ["--q", "3", "--k", "2", "--n", "2"],
        "min-kakeya": ["--q", "3", "--k", "1", "--n", "2"],
        "maximal-dist": ["--k", "1-2", "--trials", "30"],
        "maximal-norm": ["--k", "1-2", "--trials", "30"],
        "proof-trace": ["--instances", "adversarial", "--count", "6", "--keep-traces"],
    }
    trace = tmp_path / "trace.json"
    runs["proof-trace --input"] = ["--input", str(pts), "--forced-degree", "--omega", "all",
                                   "--trace-out", str(trace)]
    runs["replay"] = ["--trace", str(trace)]
    differing = []
    for label, args in runs.items():
        cmd = label.split()[0]
        reports = []
        for rep_i in range(2):
            out = tmp_path / f"{cmd}-{rep_i}.json"
            run([cmd, *args, "--seed", "5", "--out", str(out), "--violation-dump", str(tmp_path / "v.json")])
            reports.append(strip_timing(json.loads(out.read_text())))
        if reports[0] != reports[1]:
            differing.append(label)
    verdict(9, not differing, f"{len(runs)} subcommand runs repeated with seed 5; differing: {differing or 'none'}")
