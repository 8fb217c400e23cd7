"""Command-line front end.

Subcommands:

    simulate <scenario>   MC-estimate the scenario's mechanism revenue
    plan <scenario>       run the augmentation recipes on the scenario market
    check-hr <scenario>   pairwise hazard-rate dominance certificate
    ratio <scenario>      coin-observing benchmark vs the scenario mechanism
    reproduce <name>      run a built-in experiment

Common flags: --seed, --samples, --streams, --horizon, --out PATH,
--format {csv,json-lines,text-table}.  The seed comes from --seed, then the
scenario file, then the AUCTION_LAB_SEED environment variable; there is no
wall-clock fallback.

Exit codes: 0 when every verdict passes, 2 when a verdict fails, 1 on any
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .distributions import hr_crossing
from .errors import AuctionLabError, NoDominantComponent
from .experiments import DEFAULT_HORIZON, run_experiment
from .planner import (
    evaluate_plan,
    plan_hr_dominant,
    plan_nontargeted,
    plan_targeted,
    sample_based_plans,
    select_anonymous_reserve,
)
from .reports import ExperimentReport, ReportRow, write_report
from .revenue import approximation_ratio, discriminating_benchmark, estimate_mc
from .scenario import parse_scenario

__all__ = ["main"]

SEED_ENV_VAR = "AUCTION_LAB_SEED"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="auction-lab",
        description="revenue simulation for auctions with mixture-of-regular bidders",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "plan", "check-hr", "ratio"):
        p = sub.add_parser(name)
        p.add_argument("scenario", help="path to a scenario JSON file")
        _common_flags(p)
    p = sub.add_parser("reproduce")
    p.add_argument("name", help="built-in experiment name")
    _common_flags(p)
    return parser


def _common_flags(p):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--streams", type=int, default=None)
    p.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    p.add_argument("--out", default=None)
    p.add_argument(
        "--format",
        choices=("csv", "json-lines", "text-table"),
        default="csv",
    )


def _env_seed():
    raw = os.environ.get(SEED_ENV_VAR)
    return int(raw) if raw else None


def _load_scenario(args):
    with open(args.scenario, encoding="utf-8") as fh:
        text = fh.read()
    default_seed = args.seed if args.seed is not None else _env_seed()
    config = parse_scenario(text, default_seed=default_seed)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.samples is not None:
        overrides["n_samples"] = args.samples
    if args.streams is not None:
        overrides["n_streams"] = args.streams
    if overrides:
        config = replace(config, estimator=replace(config.estimator, **overrides))
    return config


def _emit(args, report: ExperimentReport) -> int:
    data = write_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(data.decode())
    return 0 if report.passed else 2


def _cmd_simulate(args) -> int:
    config = _load_scenario(args)
    return _emit(args, run_experiment(config))


def _cmd_ratio(args) -> int:
    config = _load_scenario(args)
    cfg = config.estimator
    bench = discriminating_benchmark(config.market, cfg)
    simple = estimate_mc(config.market, config.mechanism(), config.extras, cfg)
    ratio = approximation_ratio(bench, simple)
    rows = (
        ReportRow("benchmark", bench.mean, bench.std_err, bench.n_samples, bench.method),
        ReportRow(
            config.mechanism_raw["kind"],
            simple.mean,
            simple.std_err,
            simple.n_samples,
            simple.method,
        ),
        ReportRow(
            "benchmark_over_mechanism",
            ratio.ratio,
            ratio.std_err,
            0,
            "ratio",
        ),
    )
    report = ExperimentReport(
        scenario_id=config.scenario_id, rows=rows, seed=cfg.seed
    )
    return _emit(args, report)


def _cmd_plan(args) -> int:
    config = _load_scenario(args)
    market = config.market
    cfg = config.estimator
    records = []
    builders = (
        ("targeted", plan_targeted, (market,)),
        ("hr_dominant", plan_hr_dominant, (market,)),
        ("nontargeted", plan_nontargeted, (market,)),
        ("anonymous_reserve", select_anonymous_reserve, (market, cfg)),
    )
    plans = []
    for label, fn, fn_args in builders:
        try:
            plans.append(fn(*fn_args))
        except AuctionLabError as exc:
            records.append({"strategy": label, "skipped": f"{type(exc).__name__}: {exc}"})
    try:
        plans.extend(sample_based_plans(market))
    except AuctionLabError as exc:
        records.append(
            {"strategy": "sample_based", "skipped": f"{type(exc).__name__}: {exc}"}
        )
    for plan in plans:
        evidence = evaluate_plan(market, plan, cfg)
        records.append(
            {
                "strategy": plan.strategy,
                "guarantee_factor": plan.guarantee_factor,
                "extras": [
                    getattr(e, "index", getattr(e, "value", None)) for e in plan.extras
                ],
                "reserve": plan.reserve,
                "reserve_component": plan.reserve_component,
                "count": plan.count,
                "subset": list(plan.subset) if plan.subset else None,
                "assumptions": [
                    {"name": a.name, "verified": a.verified, "detail": a.detail}
                    for a in plan.assumptions
                ],
                "evidence_mean": evidence.mean,
                "evidence_std_err": evidence.std_err,
                "evidence_n_samples": evidence.n_samples,
                "seed": cfg.seed,
            }
        )
    payload = "\n".join(json.dumps(r, sort_keys=False) for r in records) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


def _cmd_check_hr(args) -> int:
    config = _load_scenario(args)
    comps = config.market.components
    matrix = []
    for i in range(len(comps)):
        row = []
        for j in range(len(comps)):
            if i == j:
                row.append(True)
            else:
                row.append(hr_crossing(comps[i], comps[j]) is None)
        matrix.append(row)
    record = {
        "components": [str(c) for c in comps],
        "dominates": matrix,
    }
    try:
        plan = plan_hr_dominant(config.market)
        record["dominant_component"] = plan.reserve_component
    except NoDominantComponent as exc:
        record["dominant_component"] = None
        record["first_crossing"] = list(exc.crossing) if exc.crossing else None
    payload = json.dumps(record, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


def _cmd_reproduce(args) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    report = run_experiment(
        args.name,
        seed=seed,
        n_samples=args.samples,
        n_streams=args.streams or 8,
        horizon=args.horizon,
    )
    return _emit(args, report)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "plan": _cmd_plan,
    "check-hr": _cmd_check_hr,
    "ratio": _cmd_ratio,
    "reproduce": _cmd_reproduce,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except AuctionLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
