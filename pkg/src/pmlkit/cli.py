"""Command-line interface: profile | solve | estimate | oracle | bench."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .distribution import PseudoDistribution
from .errors import BudgetExceeded, EmptyInput, Infeasible, PmlkitError
from .grid import DiscretizationSet, build_grid
from .oracle import OracleBudget, exact_discrete_pml, exact_profile_prob
from .pipeline import THREADS_ENV, RunConfig, estimate
from .profile import Profile, build_profile
from .properties import compute_property
from .sampling import family_weights, sample_family, true_property
from .solver import solve_frac

EXIT_IO = 2
EXIT_EMPTY = 3
EXIT_INFEASIBLE = 4
EXIT_BUDGET = 5
EXIT_BAD_SPEC = 6


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_profile(path: str) -> Profile:
    """Profile JSON if the file parses as one, otherwise whitespace tokens."""
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict) and "entries" in data:
        return Profile.from_json(text)
    tokens = text.split()
    if not tokens:
        raise EmptyInput(f"no tokens in {path}")
    return build_profile(tokens)


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        alpha=args.alpha,
        gap_tol=args.gap_tol,
        max_iters=args.max_iters,
        seed=args.seed,
        resolve_levels=args.resolve_levels,
        max_scales=args.max_scales,
    )


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=1.0 / 3.0)
    parser.add_argument("--gap-tol", type=float, default=1e-4)
    parser.add_argument("--max-iters", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--resolve-levels", action="store_true")
    parser.add_argument("--max-scales", type=int, default=200)


def cmd_profile(args) -> int:
    tokens = _read_text(args.input).split()
    if not tokens:
        raise EmptyInput(f"no tokens in {args.input}")
    print(build_profile(tokens).to_json())
    return 0


def cmd_solve(args) -> int:
    profile = _load_profile(args.input)
    grid = build_grid(profile.n, args.alpha)
    result = solve_frac(profile, grid, gap_tol=args.gap_tol, max_iters=args.max_iters)
    print(
        json.dumps(
            {
                "objective": result.objective,
                "gap": result.gap,
                "iterations": result.iterations,
                "levels": list(result.x.grid.levels),
                "rows": result.x.x.tolist(),
            }
        )
    )
    return 0


def _parse_property(spec: str):
    name, _, raw = spec.partition(":")
    params = {}
    if raw:
        key = {"support_coverage": "m", "distance_to_uniformity": "K", "support_size": "threshold"}.get(
            name, "param"
        )
        params[key] = float(raw) if name == "support_size" else int(raw)
    return name, params


def cmd_estimate(args) -> int:
    profile = _load_profile(args.input)
    cfg = _config_from_args(args)
    result = estimate(profile, cfg)
    dist = result.distribution
    payload = {
        "levels": [{"p": level, "count": count} for level, count in dist.entries],
        "total_mass": dist.mass,
        "scale": result.scale,
        "log_objective": result.log_objective,
        "properties": {},
    }
    for spec in args.properties or []:
        name, params = _parse_property(spec)
        value = compute_property(name, dist, **params)
        payload["properties"][name] = value.value
    if args.oracle_check:
        budget = OracleBudget(max_domain=args.max_domain, max_n=args.max_n)
        grid = build_grid(profile.n, cfg.alpha)
        _, log_best = exact_discrete_pml(profile, grid, budget)
        eval_budget = OracleBudget(
            max_domain=max(args.max_domain, dist.support), max_n=args.max_n
        )
        log_ours = exact_profile_prob(dist.normalize().expand(), profile, eval_budget)
        payload["oracle_log_pml"] = log_best
        payload["oracle_gap"] = log_best - log_ours
    print(json.dumps(payload))
    return 0


def cmd_oracle(args) -> int:
    profile = _load_profile(args.input)
    if args.levels:
        grid = DiscretizationSet(tuple(sorted(float(v) for v in args.levels.split(","))))
    else:
        grid = build_grid(profile.n, args.alpha)
    budget = OracleBudget(max_domain=args.max_domain, max_n=args.max_n, max_states=args.max_states)
    dist, log_prob = exact_discrete_pml(profile, grid, budget)
    print(
        json.dumps(
            {
                "levels": [{"p": level, "count": count} for level, count in dist.entries],
                "total_mass": dist.mass,
                "log_prob": log_prob,
            }
        )
    )
    return 0


def _bench_rows(spec: dict) -> list[dict]:
    try:
        families = spec["families"]
        sizes = [int(n) for n in spec["sizes"]]
        seeds = [int(s) for s in spec["seeds"]]
        properties = list(spec["properties"])
    except (KeyError, TypeError, ValueError) as exc:
        raise PmlkitError(f"invalid bench spec: {exc}") from exc
    jobs = []
    for family in families:
        if "name" not in family:
            raise PmlkitError("bench family needs a 'name'")
        for n in sizes:
            for seed in seeds:
                jobs.append((dict(family), n, seed, properties))
    return jobs


def _run_bench_job(job) -> list[dict]:
    family, n, seed, properties = job
    name = family.pop("name")
    params = family
    probs = family_weights(name, **params)
    samples = sample_family(name, n, seed, **params)
    cfg = RunConfig(seed=seed, max_scales=40)
    start = time.perf_counter()
    result = estimate(build_profile(samples), cfg)
    wall_ms = (time.perf_counter() - start) * 1000.0
    rows = []
    for spec in properties:
        prop, prop_params = _parse_property(spec)
        truth = true_property(prop, probs, **(prop_params or {"K": len(probs), "m": n}))
        est = compute_property(prop, result.distribution, **prop_params).value
        rows.append(
            {
                "family": name,
                "n": n,
                "seed": seed,
                "property": prop,
                "truth": truth,
                "estimate": est,
                "abs_error": abs(truth - est),
                "wall_ms": wall_ms,
            }
        )
    return rows


def cmd_bench(args) -> int:
    try:
        spec = json.loads(_read_text(args.spec))
        jobs = _bench_rows(spec)
    except (json.JSONDecodeError, PmlkitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC
    workers = max(1, int(os.environ.get(THREADS_ENV, "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            all_rows = list(pool.map(_run_bench_job, jobs))
    else:
        all_rows = [_run_bench_job(job) for job in jobs]
    buffer = io.StringIO()
    writer = csv.DictWriter(
        buffer,
        fieldnames=["family", "n", "seed", "property", "truth", "estimate", "abs_error", "wall_ms"],
    )
    writer.writeheader()
    for rows in all_rows:
        for row in rows:
            writer.writerow(row)
    sys.stdout.write(buffer.getvalue())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmlkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="build a profile from whitespace-separated tokens")
    p.add_argument("input")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("solve", help="solve the fractional relaxation")
    p.add_argument("input")
    _add_run_options(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate", help="run the full estimator")
    p.add_argument("input")
    _add_run_options(p)
    p.add_argument("--property", dest="properties", action="append")
    p.add_argument("--oracle-check", action="store_true")
    p.add_argument("--max-domain", type=int, default=5)
    p.add_argument("--max-n", type=int, default=8)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("oracle", help="exact discrete PML by enumeration (tiny inputs)")
    p.add_argument("input")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--levels", type=str, default="")
    p.add_argument("--max-domain", type=int, default=5)
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--max-states", type=int, default=10**7)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="synthetic benchmark table")
    p.add_argument("spec")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except Infeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except PmlkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
