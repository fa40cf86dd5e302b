"""``kakeya-lab`` command line front end.

Every subcommand writes one JSON report (schema ``kakeya-lab/report-v1``)
to ``--out`` or stdout.  Exit status: 0 success, 2 bad configuration,
3 budget or precision failure, 4 a THEOREM/LEMMA VIOLATION (the offending
objects are also dumped to ``--violation-dump``).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .checks import lt_selftest
from .errors import DomainError, PrecisionError, PreconditionError, ResourceError
from .kakeya import (as_fraction, check_covering_theorem, covering_bound, exhaustive_min_kakeya,
                     greedy_small_kakeya, profile, read_points, rspace)
from .lubin_tate import DEFAULT_EXT_BUDGET
from .maximal import CSV_HEADER, GridFunction, distribution, estimate_constants, phi_star
from .polymethod import sz as szmod
from .polymethod.trace import adversarial_instance, genuine_instance, proof_trace, replay_trace
from .rng import RNG_NAME, make_rng

REPORT_SCHEMA = "kakeya-lab/report-v1"
TIMING_FIELDS = ("timing",)
RANDOM_CHUNK = 250  # random SZ cases per seeded work unit

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_VIOLATION = 0, 2, 3, 4

DEFAULT_POINT_BUDGET = 1 << 16


class ConfigError(Exception):
    pass


def jsonable(x):
    """Convert Fractions, numpy scalars, tuples and sets to JSON types."""
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return [jsonable(v) for v in sorted(x)]
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    return x


def _frac(text) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _int_list(text) -> list[int]:
    if isinstance(text, list):
        return [int(x) for x in text]
    out = []
    for part in str(text).split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        elif part.strip():
            out.append(int(part))
    return out


# --- subcommands -------------------------------------------------------------------
# Each returns (results, violation_artifact_or_None); a dry run returns the plan.


def _check_space(cfg, budget_key="point_budget"):
    q, k, n = cfg["q"], cfg["k"], cfg["n"]
    size = (q**k) ** n
    if size > cfg[budget_key]:
        raise ResourceError(f"q^(kn) = {size} exceeds the point budget {cfg[budget_key]}")
    return size


def cmd_lt_selftest(cfg, dry):
    q, ks = cfg["q"], _int_list(cfg["k"])
    for k in ks:
        e = q ** (k - 1) * (q - 1)
        if e * (k + 2) > DEFAULT_EXT_BUDGET or q ** (2 * k) > cfg["point_budget"]:
            raise ResourceError(f"self-test at q={q}, k={k} exceeds the budget")
    if dry:
        return {"plan": [{"q": q, "k": k, "pairs": q ** (2 * k)} for k in ks]}, None
    reps = [lt_selftest(q, k).to_json() for k in ks]
    ok = all(r["passed"] for r in reps)
    res = {"reports": reps, "passed": ok}
    return res, (None if ok else {"kind": "lubin-tate self-test failure", "reports": reps})


def cmd_sz_verify(cfg, dry):
    q, k, n = cfg["q"], cfg["k"], cfg["n"]
    theta = cfg["theta"]
    plan = {}
    if cfg["exhaustive"]:
        cases = ((q ** (cfg["coeff_deg"] + 1)) ** ((cfg["max_deg"] + 1) ** n) - 1)
        plan["exhaustive_cases"] = cases
        if cases > cfg["case_budget"]:
            raise ResourceError(f"exhaustive sweep has {cases} polynomials (budget {cfg['case_budget']})")
    plan["random_cases"] = cfg["random"]
    if (q**k) ** n > cfg["point_budget"]:
        raise ResourceError("C^n exceeds the point budget")
    if dry:
        return {"plan": plan}, None
    out = {}
    if cfg["exhaustive"]:
        thetas = [theta] if theta is not None else [Fraction(1, 2), Fraction(1)]
        sw = szmod.exhaustive_sweep(q, k, n, cfg["max_deg"], cfg["coeff_deg"], thetas)
        out["exhaustive"] = sw.to_json()
    if cfg["random"]:
        # chunking (and so the per-chunk seeds) must not depend on --jobs
        chunks = _chunks(cfg["random"], -(-cfg["random"] // RANDOM_CHUNK))
        tasks = [(q, k, n, c, [cfg["seed"], i], None if theta is None else [theta]) for i, c in enumerate(chunks)]
        results = _map(_random_sweep_task, tasks, cfg["jobs"])
        merged = szmod.SweepResult()
        for r in results:
            merged.cases += r.cases
            merged.violations.extend(r.violations)
            merged.max_count_ratio = max(merged.max_count_ratio, r.max_count_ratio)
        out["random"] = merged.to_json()
    viol = [v for part in out.values() for v in part["violations"]]
    out["status"] = "LEMMA VIOLATION" if viol else "pass"
    return out, ({"kind": "LEMMA VIOLATION", "cases": viol} if viol else None)


def _random_sweep_task(args):
    q, k, n, count, seed, thetas = args
    return szmod.random_sweep(q, k, n, count, seed, thetas)


def _chunks(total: int, parts: int) -> list[int]:
    parts = max(1, min(parts, total))
    base, extra = divmod(total, parts)
    return [base + (i < extra) for i in range(parts)]


def _map(fn, tasks, jobs):
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, tasks))
    return [fn(t) for t in tasks]


def _load_or_generate(cfg, space):
    if cfg.get("input"):
        return read_points(cfg["input"], space), {"input": str(cfg["input"])}
    E = greedy_small_kakeya(space.k, space.n, space.q, cfg["seed"], space=space)
    return E, {"generated": "greedy_small_kakeya", "seed": cfg["seed"]}


def cmd_covering(cfg, dry):
    _check_space(cfg)
    if dry:
        return {"plan": {"points": (cfg["q"] ** cfg["k"]) ** cfg["n"]}}, None
    space = rspace(cfg["q"], cfg["k"], cfg["n"])
    E, source = _load_or_generate(cfg, space)
    eps = cfg["eps"]
    nu = profile(space, E).nu(eps) if cfg["nu"] == "auto" else _frac(cfg["nu"])
    if nu == 0:
        raise DomainError(f"no direction has a line meeting E in eps*q^k = {eps * space.Q} points")
    rep = check_covering_theorem(space, E, eps, nu)
    res = {"source": source, "nu_mode": "auto" if cfg["nu"] == "auto" else "given", **rep.to_json()}
    art = None
    if rep.status == "THEOREM VIOLATION":
        art = {"kind": "THEOREM VIOLATION", "E": sorted(E), "eps": eps, "nu": nu}
    return res, art


def cmd_min_kakeya(cfg, dry):
    q, k, n = cfg["q"], cfg["k"], cfg["n"]
    space = rspace(q, k, n) if (q**k) ** n <= cfg["point_budget"] else None
    if space is None:
        raise ResourceError("space exceeds the point budget")
    if space.npoints > cfg["search_budget"]:
        raise ResourceError(f"|R^n| = {space.npoints} exceeds the exhaustive search budget {cfg['search_budget']}")
    if dry:
        return {"plan": {"points": space.npoints, "direction_classes": len(space.direction_classes)}}, None
    size, witness = exhaustive_min_kakeya(k, n, q, budget=cfg["search_budget"])
    nu = 1 - Fraction(1, q**n)
    bound = covering_bound(1, nu, k, n, q)
    res = {"min_size": size, "witness": sorted(witness), "eps": 1, "nu": nu, "covering_bound": bound,
           "status": "pass" if size >= bound else "THEOREM VIOLATION"}
    art = None if size >= bound else {"kind": "THEOREM VIOLATION", **res}
    return res, art


def _maximal_common(cfg, dry, kind):
    q, n, ks, trials = cfg["q"], cfg["n"], _int_list(cfg["k"]), cfg["trials"]
    for k in ks:
        if (q**k) ** n > cfg["point_budget"]:
            raise ResourceError(f"q^(kn) at k={k} exceeds the point budget")
    if dry:
        return {"plan": {"k": ks, "trials": trials}}, None
    if cfg.get("input"):
        if len(ks) != 1:
            raise ConfigError("--input needs a single k")
        space = rspace(q, ks[0], n)
        E = read_points(cfg["input"], space)
        phi = GridFunction.indicator(space, E)
        star = phi_star(phi)
        lams = [Fraction(x) for x in cfg["lambdas"]] if cfg.get("lambdas") else sorted(
            {Fraction(v).limit_denominator(space.Q) for v in star.values if v > 0}, reverse=True)
        res = {"phi_star": [[list(w), v] for w, v in star.as_dict().items()],
               "distribution": [{"lambda": lam, "count": distribution(star, float(lam))} for lam in lams],
               "norm_pow": phi.norm_pow(),
               "star_norm_pow": float(np.sum(star.values**n))}
        return res, None
    tables = _map(_estimate_task, [(q, k, n, trials, cfg["seed"]) for k in ks], cfg["jobs"])
    rows = [r for t in tables for r in t.rows]
    summary = {"max_distribution_ratio_per_k": {}, "max_norm_ratio_per_k": {}, "lower_bound_failures": 0}
    for t in tables:
        s = t.summary()
        summary["max_distribution_ratio_per_k"].update(s["max_distribution_ratio_per_k"])
        summary["max_norm_ratio_per_k"].update(s["max_norm_ratio_per_k"])
        summary["lower_bound_failures"] += s["lower_bound_failures"]
    key = "max_distribution_ratio_per_k" if kind == "dist" else "max_norm_ratio_per_k"
    per_k = summary[key]
    first, last = per_k[str(ks[0])], per_k[str(ks[-1])]
    res = {"q": q, "n": n, "k": ks, "trials": trials, "seed": cfg["seed"], "rng": RNG_NAME,
           "per_k_max": per_k, "overall_max": max(per_k.values()),
           "growth_first_to_last": (last / first) if first else None,
           "lower_bound_failures": summary["lower_bound_failures"],
           "summary": summary}
    if kind == "norm":
        res["norm_rows"] = [r for t in tables for r in t.norm_rows]
    if cfg.get("csv"):
        with open(cfg["csv"], "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow([r[h] for h in CSV_HEADER])
        res["csv"] = str(cfg["csv"])
    art = None
    if summary["lower_bound_failures"]:
        art = {"kind": "universal lower bound failure", "count": summary["lower_bound_failures"]}
    return res, art


def _estimate_task(args):
    q, k, n, trials, seed = args
    return estimate_constants(q, [k], n, trials, seed)


def cmd_maximal_dist(cfg, dry):
    return _maximal_common(cfg, dry, "dist")


def cmd_maximal_norm(cfg, dry):
    return _maximal_common(cfg, dry, "norm")


def _trace_task(args):
    q, k, n, kind, seed, i, N = args
    space = rspace(q, k, n)
    rng = make_rng([seed, i])
    if kind == "genuine":
        E, eps, nu = genuine_instance(space, rng)
        tr = proof_trace(E, eps, nu, q, k, n, N=N)
        flavour = "genuine"
    else:
        inst = adversarial_instance(space, rng)
        tr = proof_trace(inst["E"], inst["eps"], inst["nu"], q, k, n, omega=inst["omega"],
                         forced_degree=True, N=N)
        flavour = inst["flavour"]
    return {"index": i, "flavour": flavour, "size": len(tr.E), "eps": tr.epsilon, "nu": tr.nu,
            "terminated_at": tr.terminated_at, "failure": tr.failure, "completed": tr.completed,
            "precision_raised": tr.precision_raised, "trace": tr.to_json()}


def cmd_proof_trace(cfg, dry):
    q, k, n = cfg["q"], cfg["k"], cfg["n"]
    _check_space(cfg)
    N = cfg["N"] or k + 2
    e = q ** (k - 1) * (q - 1)
    if 2 * e * N > DEFAULT_EXT_BUDGET:
        raise ResourceError(f"extension precision e*N = {e * N} (doubled on retry) exceeds the budget")
    if dry:
        return {"plan": {"instances": cfg["instances"], "count": cfg["count"], "N": N}}, None
    if cfg["instances"]:
        tasks = [(q, k, n, cfg["instances"], cfg["seed"], i, N) for i in range(cfg["count"])]
        outs = _map(_trace_task, tasks, cfg["jobs"])
        summary = {
            "kind": cfg["instances"], "count": len(outs),
            "terminated_at": {str(s): sum(o["terminated_at"] == s for o in outs) for s in (1, 2, 3, 4, 5)},
            "completed": sum(o["completed"] for o in outs),
            "precision_raised": sum(o["precision_raised"] for o in outs),
        }
        keep = cfg["keep_traces"]
        res = {"summary": summary,
               "instances": [{kk: v for kk, v in o.items() if kk != "trace" or keep} for o in outs]}
        bad = [o["trace"] for o in outs if o["completed"]]
        return res, ({"kind": "THEOREM VIOLATION", "traces": bad} if bad else None)
    space = rspace(q, k, n)
    E, source = _load_or_generate(cfg, space)
    eps = cfg["eps"]
    nu = profile(space, E).nu(eps) if cfg["nu"] == "auto" else _frac(cfg["nu"])
    if nu == 0:
        raise DomainError("nu = 0: no direction qualifies at this eps")
    omega = None
    if cfg["omega"] == "all":
        omega = list(range(space.ndirections))
    tr = proof_trace(E, eps, nu, q, k, n, omega=omega, forced_degree=cfg["forced_degree"], N=N)
    data = tr.to_json()
    if cfg.get("trace_out"):
        Path(cfg["trace_out"]).write_text(json.dumps(jsonable(data), indent=1, sort_keys=True) + "\n")
    res = {"source": source, "verdict": tr.verdict, "terminated_at": tr.terminated_at,
           "completed": tr.completed, "trace": data}
    return res, ({"kind": "THEOREM VIOLATION", "trace": data} if tr.completed else None)


def cmd_replay(cfg, dry):
    path = cfg.get("trace")
    if not path:
        raise ConfigError("replay needs --trace FILE")
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read trace {path}: {exc}") from exc
    if dry:
        return {"plan": {"trace": str(path), "schema": data.get("schema")}}, None
    rep = replay_trace(data)
    res = {"trace": str(path), **rep.to_json(), "completed": data.get("completed")}
    if data.get("completed") and rep.ok:
        return res, {"kind": "THEOREM VIOLATION", "trace": data}
    if not rep.ok:
        res["status"] = "replay mismatch"
        return res, {"kind": "replay mismatch", "mismatches": rep.mismatches, "trace": data}
    return res, None


COMMANDS: dict[str, Callable] = {
    "lt-selftest": cmd_lt_selftest,
    "sz-verify": cmd_sz_verify,
    "covering": cmd_covering,
    "min-kakeya": cmd_min_kakeya,
    "maximal-dist": cmd_maximal_dist,
    "maximal-norm": cmd_maximal_norm,
    "proof-trace": cmd_proof_trace,
    "replay": cmd_replay,
}


# --- argument parsing ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kakeya-lab", description="Exact Kakeya experiments over F_q[[t]].")
    p.add_argument("--version", action="version", version=f"kakeya-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, qkn=True, k_list=False):
        sp.add_argument("--config", help="JSON file of option values; flags override it")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--violation-dump", default="kakeya-lab-violation.json")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--dry-run", action="store_true", help="validate parameters and budgets only")
        sp.add_argument("--point-budget", type=int, default=DEFAULT_POINT_BUDGET)
        if qkn:
            sp.add_argument("--q", type=int, default=2)
            if k_list:
                sp.add_argument("--k", default="1", help="k or a range like 1-3 or 1,2,3")
            else:
                sp.add_argument("--k", type=int, default=2)
            sp.add_argument("--n", type=int, default=2)

    s = sub.add_parser("lt-selftest", help="Lubin-Tate identities, exhaustively over A_k")
    common(s, k_list=True)
    s = sub.add_parser("sz-verify", help="discrete-valuation Schwartz-Zippel count vs bound")
    common(s)
    s.add_argument("--theta", type=_frac, default=None)
    s.add_argument("--exhaustive", action="store_true")
    s.add_argument("--random", type=int, default=0, help="number of random polynomials")
    s.add_argument("--max-deg", type=int, default=3)
    s.add_argument("--coeff-deg", type=int, default=2)
    s.add_argument("--case-budget", type=int, default=1 << 16)
    s = sub.add_parser("covering", help="size of a point set vs the covering bound")
    common(s)
    s.add_argument("--input", help="point-set file (default: a greedy Kakeya set)")
    s.add_argument("--eps", type=_frac, default=Fraction(1))
    s.add_argument("--nu", default="auto", help="rational, or 'auto' for |Omega_eps| / q^(kn)")
    s = sub.add_parser("min-kakeya", help="exhaustive minimum Kakeya set")
    common(s)
    s.add_argument("--search-budget", type=int, default=16, help="max |R^n| for the exhaustive search")
    for name, hlp in (("maximal-dist", "distributional estimate"), ("maximal-norm", "L^n estimate")):
        s = sub.add_parser(name, help=f"maximal function: {hlp}")
        common(s, k_list=True)
        s.add_argument("--trials", type=int, default=200)
        s.add_argument("--csv", help="CSV output of (q,k,n,lambda,lhs,rhs,ratio,seed) rows")
        s.add_argument("--input", help="indicator of a point set instead of random trials")
        s.add_argument("--lambdas", type=_frac, nargs="*")
    s = sub.add_parser("proof-trace", help="executable trace of the covering argument")
    common(s)
    s.add_argument("--input", help="point-set file (default: a greedy Kakeya set)")
    s.add_argument("--eps", type=_frac, default=Fraction(1))
    s.add_argument("--nu", default="auto")
    s.add_argument("--omega", choices=("profile", "all"), default="profile")
    s.add_argument("--forced-degree", action="store_true")
    s.add_argument("--N", type=int, default=None, help="t-adic working precision (default k+2)")
    s.add_argument("--trace-out", help="write the trace JSON here")
    s.add_argument("--instances", choices=("genuine", "adversarial"), help="batch of random instances")
    s.add_argument("--count", type=int, default=50)
    s.add_argument("--keep-traces", action="store_true")
    s = sub.add_parser("replay", help="re-verify a stored proof trace")
    common(s, qkn=False)
    s.add_argument("--trace", help="trace JSON file")
    return p


def _apply_config_file(parser: argparse.ArgumentParser, argv: Sequence[str]):
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items() if k != "command"}
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for a in sub._actions:
        if a.dest in data and a.type is not None and data[a.dest] is not None:
            v = data[a.dest]
            data[a.dest] = [a.type(x) for x in v] if isinstance(v, list) else a.type(v)
    sub.set_defaults(**data)
    return parser.parse_args(argv)


def _write(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config_file(parser, argv)
    except ConfigError as exc:
        sys.stderr.write(f"kakeya-lab: configuration error: {exc}\n")
        return EXIT_CONFIG
    cfg = dict(vars(args))
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    report = {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "command": args.command,
        "config": {k: v for k, v in cfg.items() if k not in ("out", "violation_dump", "config", "jobs")},
        "seed": cfg.get("seed"),
        "rng": RNG_NAME,
        "dry_run": bool(cfg.get("dry_run")),
    }
    code = EXIT_OK
    artifact = None
    try:
        results, artifact = COMMANDS[args.command](cfg, bool(cfg.get("dry_run")))
        report["results"] = results
        report["status"] = "violation" if artifact else "ok"
        if artifact:
            code = EXIT_VIOLATION
    except ConfigError as exc:
        report.update(status="error", error=f"configuration: {exc}")
        code = EXIT_CONFIG
    except (ResourceError, PrecisionError) as exc:
        report.update(status="error", error=f"{type(exc).__name__}: {exc}")
        code = EXIT_BUDGET
    except (DomainError, PreconditionError, ValueError) as exc:
        report.update(status="error", error=f"{type(exc).__name__}: {exc}")
        code = EXIT_CONFIG
    report["exit_code"] = code
    report["timing"] = {"started": started.isoformat(), "wall_time_s": time.perf_counter() - t0}
    text = json.dumps(jsonable(report), indent=1, sort_keys=True) + "\n"
    _write(text, cfg.get("out"))
    if artifact is not None:
        Path(cfg["violation_dump"]).write_text(
            json.dumps(jsonable({"schema": REPORT_SCHEMA, "command": args.command, "config": report["config"],
                                 "violation": artifact}), indent=1, sort_keys=True) + "\n")
    if code:
        sys.stderr.write(f"kakeya-lab: exit {code}: {report.get('error', 'violation recorded')}\n")
    return code


def strip_timing(report: dict) -> dict:
    """A report without its timing fields, for determinism comparisons."""
    return {k: v for k, v in report.items() if k not in TIMING_FIELDS}


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
