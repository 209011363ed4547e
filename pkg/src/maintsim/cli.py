"""Command-line driver.

Subcommands: ``validate`` (check a system file), ``decompose`` (print the
module table), ``simulate`` (run one campaign, write records + summary),
``compare`` (run baseline and candidate campaigns under common random
numbers, write the cost-benefit report and plot data).

Exit codes: 0 success, 1 validation failure, 2 runtime fault.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import compare_strategies, maintenance_table, summarize
from .io import (
    RunManifest,
    sha256_of_file,
    write_manifest,
    write_plot_csv,
    write_records_csv,
    write_report_json,
    write_summary_json,
)
from .model import ModelError, load_system, validate
from .modules import DecompositionError, decompose
from .simulate import StrategyConfig, load_strategy, run_campaign

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAULT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maintsim",
        description="Maintenance lifetime simulation and strategy cost-benefit analysis.",
    )
    parser.add_argument("--version", action="version", version=f"maintsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system file against every model invariant")
    p.add_argument("--system", required=True, help="system JSON file")
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="report format")

    p = sub.add_parser("decompose", help="print the failure-module table")
    p.add_argument("--system", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("simulate", help="run a campaign and write records + summary")
    p.add_argument("--system", required=True)
    p.add_argument("--strategy", help="strategy JSON file (omit for corrective-only)")
    p.add_argument("--seed", type=int, help="override the scenario seed (unsigned 64-bit)")
    p.add_argument("--iterations", type=int, help="override the scenario iteration count")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--trace", action="store_true", help="log per-mission events to stderr")

    p = sub.add_parser("compare", help="evaluate a candidate strategy against a baseline")
    p.add_argument("--system", required=True)
    p.add_argument("--baseline", required=True, help="baseline strategy JSON file")
    p.add_argument("--candidate", required=True, help="candidate strategy JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=".")
    p.add_argument(
        "--min-failures",
        type=float,
        help="only list components whose mean CM count exceeds this in the plot data",
    )
    return parser


def _load_model(path: str):
    try:
        return load_system(path), None
    except FileNotFoundError as exc:
        return None, [f"{path}: {exc.strerror}"]
    except ModelError as exc:
        return None, [str(v) for v in exc.violations]


def _cmd_validate(args) -> int:
    model, problems = _load_model(args.system)
    if model is None:
        report = {"ok": False, "violations": problems}
    else:
        result = validate(model)
        report = {"ok": result.ok, "violations": [str(v) for v in result.violations]}
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        if report["ok"]:
            print("ok")
        else:
            for line in report["violations"]:
                print(line)
    return EXIT_OK if report["ok"] else EXIT_INVALID


def _cmd_decompose(args) -> int:
    model, problems = _load_model(args.system)
    if model is None:
        for line in problems:
            print(line, file=sys.stderr)
        return EXIT_INVALID
    try:
        modules = decompose(model)
    except DecompositionError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    if args.format == "json":
        doc = [
            {"module": m.index, "subsystem": m.subsystem, "members": list(m.members)}
            for m in modules
        ]
        print(json.dumps(doc, indent=2))
    else:
        writer = csv.writer(sys.stdout)
        writer.writerow(["module", "subsystem", "members"])
        for m in modules:
            writer.writerow([m.index, m.subsystem or "", ";".join(str(c) for c in m.members)])
    return EXIT_OK


def _resolve_run(args):
    model, problems = _load_model(args.system)
    if model is None:
        for line in problems:
            print(line, file=sys.stderr)
        return None
    scenario = model.scenario
    seed = args.seed if args.seed is not None else scenario.seed
    iterations = args.iterations if args.iterations is not None else scenario.iterations
    if iterations < 1:
        print("iterations must be at least 1", file=sys.stderr)
        return None
    if not (0 <= seed < 2**64):
        print("seed must fit in an unsigned 64-bit integer", file=sys.stderr)
        return None
    return model, seed, iterations


def _cmd_simulate(args) -> int:
    resolved = _resolve_run(args)
    if resolved is None:
        return EXIT_INVALID
    model, seed, iterations = resolved
    if args.strategy is not None:
        try:
            strategy = load_strategy(args.strategy)
            strategy.check_against(model)
        except (OSError, ValueError, json.JSONDecodeError) as exc:
            print(f"strategy file: {exc}", file=sys.stderr)
            return EXIT_INVALID
    else:
        strategy = StrategyConfig.none()

    trace = None
    if args.trace:
        trace = lambda event: print(json.dumps(event), file=sys.stderr)
    records = run_campaign(
        model,
        strategy,
        iterations=iterations,
        seed=seed,
        threads=1 if args.trace else args.threads,
        trace=trace,
    )
    summary = summarize(records)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.for_run(
        sha256_of_file(args.system),
        model.scenario,
        seed,
        iterations,
        strategy_sha256=None if args.strategy is None else sha256_of_file(args.strategy),
    )
    component_ids = [c.id for c in model.components]
    write_records_csv(out / "records.csv", records, component_ids, manifest)
    write_summary_json(out / "summary.json", summary, manifest)
    write_manifest(out / "manifest.json", manifest)
    print(f"wrote {out / 'records.csv'}, {out / 'summary.json'}, {out / 'manifest.json'}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    resolved = _resolve_run(args)
    if resolved is None:
        return EXIT_INVALID
    model, seed, iterations = resolved
    try:
        baseline = load_strategy(args.baseline)
        baseline.check_against(model)
        candidate = load_strategy(args.candidate)
        candidate.check_against(model)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"strategy file: {exc}", file=sys.stderr)
        return EXIT_INVALID

    # Shared seed: both campaigns see identical random streams, so the
    # comparison runs under common random numbers.
    base_records = run_campaign(model, baseline, iterations=iterations, seed=seed, threads=args.threads)
    cand_records = run_campaign(model, candidate, iterations=iterations, seed=seed, threads=args.threads)
    report = compare_strategies(base_records, cand_records, model, strategy=candidate)
    rows = maintenance_table(report, model, min_failures=args.min_failures)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.for_run(
        sha256_of_file(args.system),
        model.scenario,
        seed,
        iterations,
        baseline_sha256=sha256_of_file(args.baseline),
        candidate_sha256=sha256_of_file(args.candidate),
    )
    write_report_json(out / "report.json", report, manifest)
    write_plot_csv(out / "plot_data.csv", rows, manifest)
    write_manifest(out / "manifest.json", manifest)
    roi_text = "n/a" if report.roi is None else f"{report.roi:.3f}"
    print(
        f"cost avoidance {report.cost_avoidance:,.0f} on investment "
        f"{report.total_investment:,.0f} (ROI {roi_text})"
    )
    print(f"wrote {out / 'report.json'}, {out / 'plot_data.csv'}, {out / 'manifest.json'}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "validate": _cmd_validate,
        "decompose": _cmd_decompose,
        "simulate": _cmd_simulate,
        "compare": _cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except Exception as exc:  # runtime fault, not a validation problem
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAULT


if __name__ == "__main__":
    sys.exit(main())
