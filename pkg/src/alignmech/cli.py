"""Command-line experiment runner.

Exit status: 0 when every checked property passed, 1 on a property failure
(the report is still written), 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from typing import Optional, Sequence

from .config import ConfigError, ScenarioConfig, config_from_dict
from .core import TOL, MechanismError
from .engine import run_batch
from .mechanism import check_payment_property
from .report import render_report, render_table, write_report, write_text
from .verify import (check_incentive_compatibility, check_individual_rationality,
                     check_selection_efficiency, check_social_optimality,
                     search_counterexample)

log = logging.getLogger("alignmech")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON configuration file")
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seeds", type=int, metavar="N", help="use seeds 0..N-1")
    seeds.add_argument("--seed-list", metavar="S1,S2,...", help="explicit comma-separated seeds")
    p.add_argument("--scheme", help="e.g. SecondPriceLinear, RealizationOnly(1,-1), VCGStyle")
    p.add_argument("--cost", help="Linear, Quadratic or Power(p)")
    p.add_argument("--profit", help="QuadraticDecreasing(s0,c) or LinearDecreasing(s0,a)")
    p.add_argument("--tiebreak", help="ProSocial, Adversarial, MaxAlignment or Lazy")
    p.add_argument("--n-agents", type=int, dest="n_agents")
    p.add_argument("--out", metavar="PATH", help="report path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alignmech",
        description="Run and verify the lowest-report auction with realization-based payment.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("run", help="one outcome row per seed"))
    p = sub.add_parser("verify", help="exhaustive property check")
    p.add_argument("check", choices=("ic", "ir", "so", "selection"))
    _common(p)
    _common(sub.add_parser("payment-check", help="check the payment property on the grids"))
    p = sub.add_parser("counterexample", help="first witness violating a property")
    p.add_argument("--property", choices=("IC", "IR", "SO", "PaymentProperty"))
    p.add_argument("--budget", type=int)
    p.add_argument("--threshold", type=float)
    _common(p)
    p = sub.add_parser("sweep", help="Cartesian sweep over config keys")
    p.add_argument("--axis", action="append", default=[], metavar="KEY=V1,V2,...",
                   help="config key and values; repeat for a Cartesian product")
    _common(p)
    return parser


def _axis_value(token: str):
    try:
        return json.loads(token)
    except json.JSONDecodeError:
        return token


def load_document(args: argparse.Namespace) -> dict:
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("<document>", f"malformed JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
    flags = {"scheme": args.scheme, "cost": args.cost, "profit": args.profit,
             "tieBreak": args.tiebreak, "nAgents": args.n_agents, "output": args.out,
             "format": args.format, "workers": args.workers, "seeds": args.seeds}
    if args.seed_list:
        try:
            flags["seeds"] = [int(s) for s in args.seed_list.split(",") if s.strip()]
        except ValueError:
            raise ConfigError("seeds", f"bad seed list {args.seed_list!r}") from None
    for key in ("property", "budget", "threshold"):
        flags[key] = getattr(args, key, None)
    doc.update({k: v for k, v in flags.items() if v is not None})
    for axis in getattr(args, "axis", []):
        key, _, values = axis.partition("=")
        if not values:
            raise ConfigError("sweep", f"axis {axis!r} needs KEY=V1,V2,...")
        doc.setdefault("sweep", {})[key.strip()] = [_axis_value(v) for v in values.split(",")]
    return doc


def cmd_run(config: ScenarioConfig) -> int:
    outcomes = run_batch(config, workers=config.workers)
    write_report(outcomes, config.output, config.format)
    bad = [o.seed for o in outcomes
           if abs(o.social_welfare - (o.principal_utility + sum(o.agent_utilities))) > TOL]
    if bad:
        log.error("welfare identity violated for seeds %s", bad)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_verify(config: ScenarioConfig, prop: str, fmt: str = "json") -> int:
    check = {"ic": check_incentive_compatibility, "ir": check_individual_rationality,
             "so": check_social_optimality, "selection": check_selection_efficiency}[prop]
    report = check(config)
    write_text(render_report(report, fmt), config.output)
    log.info("%s: %s (%d checked, %d counterexamples)", report.property,
             "passed" if report.passed else "FAILED", report.checked,
             len(report.counterexamples))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_payment_check(config: ScenarioConfig, fmt: str = "json") -> int:
    report = check_payment_property(config.scheme, config.cost, config.theta_grid,
                                    config.gamma_grid, config.profit)
    write_text(render_report(report, fmt), config.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_counterexample(config: ScenarioConfig, fmt: str = "json") -> int:
    result = search_counterexample(config, config.property, config.budget, config.threshold)
    write_text(render_report(result, fmt), config.output)
    if result.status == "none":
        log.info("none within budget (%d evaluations)", result.evaluations)
        return EXIT_OK
    return EXIT_FAIL


def sweep_rows(doc: dict) -> list[dict]:
    base = {k: v for k, v in doc.items() if k != "sweep"}
    axes = doc.get("sweep") or {}
    keys = list(axes)
    rows = []
    for values in itertools.product(*(axes[k] for k in keys)):
        point = dict(zip(keys, values))
        config = config_from_dict({**base, **point})
        outcomes = run_batch(config, workers=config.workers)
        gaps = [o.welfare_gap for o in outcomes]
        row = dict(point)
        row.update({
            "n_seeds": len(outcomes),
            "mean_social_welfare": (sum(o.social_welfare for o in outcomes) / len(outcomes)
                                    if outcomes else None),
            "mean_welfare_gap": sum(gaps) / len(gaps) if gaps else None,
            "max_welfare_gap": max(gaps) if gaps else None,
            "min_agent_utility": min((min(o.agent_utilities) for o in outcomes), default=None),
            "min_principal_utility": min((o.principal_utility for o in outcomes), default=None),
            "so_passed": all(abs(g) <= TOL for g in gaps),
            "ir_passed": all(min(o.agent_utilities) >= -1e-12 for o in outcomes),
        })
        rows.append(row)
    return rows


def cmd_sweep(doc: dict, config: ScenarioConfig) -> int:
    rows = sweep_rows(doc)
    write_text(render_table(rows, config.format), config.output)
    return EXIT_OK if all(r["so_passed"] and r["ir_passed"] for r in rows) else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        doc = load_document(args)
        config = config_from_dict(doc)
        # verification reports default to JSON; outcome tables to CSV
        report_fmt = doc.get("format", "json")
        if args.command == "run":
            return cmd_run(config)
        if args.command == "verify":
            return cmd_verify(config, args.check, report_fmt)
        if args.command == "payment-check":
            return cmd_payment_check(config, report_fmt)
        if args.command == "counterexample":
            return cmd_counterexample(config, report_fmt)
        if config.sweep == {}:
            raise ConfigError("sweep", "declare at least one axis (--axis KEY=V1,V2)")
        return cmd_sweep(doc, config)
    except (MechanismError, OSError) as exc:
        print(f"alignmech: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
