"""Command-line front end.

Commands: ``solve``, ``sweep``, ``export-lp``, ``simulate``. Exit codes are
stable across commands: 0 for an optimal result, 2 for infeasibility, 1 for
any error (sweep exits 2 only when every budget is infeasible).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

from .formulation import export_lp
from .instancefile import InstanceFileError, load_instance_file
from .model import (
    Instance,
    InstanceValidationError,
    min_feasible_budget,
)
from .montecarlo import estimate_detection
from .solver import DEFAULT_ENGINE, ENGINES, SolveOutcome, solve
from .sweep import EntryStatus, SweepReport, contribution_breakdown, run_sweep

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2

# Cumulative monitoring labels for the classic four-layer schedule.
LAYER_LABELS_4 = {
    1: "Ethernet",
    2: "Ethernet + IP",
    3: "Ethernet + IP + transport",
    4: "Ethernet + IP + transport + application",
}


def layer_label(instance: Instance, layer: int) -> str:
    if instance.num_layers == 4:
        return LAYER_LABELS_4[layer]
    return f"layer {layer}"


def _fmt(x: float) -> str:
    """Shortest exact decimal: integral floats drop the trailing '.0'."""
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _load_single_budget(path: str) -> Instance:
    instance, budgets = load_instance_file(path)
    if budgets is not None:
        raise InstanceFileError(
            f"{path}: this command needs a single 'budget', not a 'budgets' list"
        )
    return instance


def _print_table(rows: list[list[str]], header: list[str]) -> None:
    widths = [
        max(len(header[c]), *(len(r[c]) for r in rows)) if rows else len(header[c])
        for c in range(len(header))
    ]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    for row in rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())


def _solve_rows(instance: Instance, outcome: SolveOutcome) -> list[dict]:
    allocation = outcome.allocation
    assert allocation is not None
    rows = []
    for item in contribution_breakdown(allocation, instance):
        rows.append(
            {
                "device_id": item.device_id,
                "layer": item.layer,
                "monitoring": layer_label(instance, item.layer),
                "layer_cost": instance.schedule.cost(item.layer),
                "contribution": item.contribution,
            }
        )
    return rows


def cmd_solve(args: argparse.Namespace) -> int:
    instance = _load_single_budget(args.instance)
    outcome = solve(instance, engine=args.engine)
    if not outcome.is_optimal:
        needed = min_feasible_budget(instance)
        if args.format == "json":
            print(
                json.dumps(
                    {
                        "status": "infeasible",
                        "budget": instance.budget,
                        "min_feasible_budget": needed,
                    },
                    indent=2,
                )
            )
        else:
            print(
                f"infeasible: budget {_fmt(instance.budget)} is below the minimum "
                f"feasible budget {_fmt(needed)}"
            )
        return EXIT_INFEASIBLE

    allocation = outcome.allocation
    assert allocation is not None
    rows = _solve_rows(instance, outcome)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "status": "optimal",
                    "budget": instance.budget,
                    "total_cost": allocation.total_cost,
                    "objective": allocation.objective,
                    "engine": args.engine,
                    "assignment": rows,
                },
                indent=2,
            )
        )
    elif args.format == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["device_id", "layer", "layer_cost", "contribution"])
        for row in rows:
            writer.writerow(
                [row["device_id"], row["layer"], _fmt(row["layer_cost"]), repr(row["contribution"])]
            )
    else:
        names = {d.id: d.name for d in instance.devices}
        print("status: optimal")
        print(f"budget: {_fmt(instance.budget)}")
        print(f"total cost: {_fmt(allocation.total_cost)}")
        print(f"objective: {repr(allocation.objective)}")
        table = [
            [
                row["device_id"],
                names[row["device_id"]],
                str(row["layer"]),
                row["monitoring"],
                _fmt(row["layer_cost"]),
                repr(row["contribution"]),
            ]
            for row in rows
        ]
        _print_table(table, ["device", "name", "layer", "monitoring", "cost", "contribution"])
    return EXIT_OK


def assignments_csv(report: SweepReport, instance: Instance) -> str:
    """Fig-1-style table: one row per (budget, device)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["budget", "device_id", "layer", "layer_cost"])
    for entry in report.entries:
        if entry.status is EntryStatus.OPTIMAL:
            for item in entry.contributions:
                writer.writerow(
                    [
                        _fmt(entry.budget),
                        item.device_id,
                        item.layer,
                        _fmt(instance.schedule.cost(item.layer)),
                    ]
                )
        else:
            for device in instance.devices:
                writer.writerow([_fmt(entry.budget), device.id, "", ""])
    return buf.getvalue()


def contributions_csv(report: SweepReport, instance: Instance) -> str:
    """Fig-2-style table: per-device contribution with entry status."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["budget", "device_id", "contribution", "objective", "total_cost", "status"])
    for entry in report.entries:
        if entry.status is EntryStatus.OPTIMAL:
            for item in entry.contributions:
                writer.writerow(
                    [
                        _fmt(entry.budget),
                        item.device_id,
                        repr(item.contribution),
                        repr(entry.objective),
                        _fmt(entry.total_cost),
                        entry.status.value,
                    ]
                )
        else:
            for device in instance.devices:
                writer.writerow(
                    [_fmt(entry.budget), device.id, "", "", "", entry.status.value]
                )
    return buf.getvalue()


def cmd_sweep(args: argparse.Namespace) -> int:
    instance, budgets = load_instance_file(args.instance)
    if args.budgets is not None:
        budgets = args.budgets
    if budgets is None:
        budgets = [instance.budget]
    if not budgets:
        return _fail("empty budget list")

    report = run_sweep(instance, budgets, engine=args.engine)

    os.makedirs(args.output, exist_ok=True)
    assignments_path = os.path.join(args.output, "assignments.csv")
    contributions_path = os.path.join(args.output, "contributions.csv")
    with open(assignments_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(assignments_csv(report, instance))
    with open(contributions_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(contributions_csv(report, instance))

    if args.format == "json":
        print(
            json.dumps(
                {
                    "engine": args.engine,
                    "entries": [
                        {
                            "budget": e.budget,
                            "status": e.status.value,
                            "objective": e.objective,
                            "total_cost": e.total_cost,
                            "min_feasible_budget": e.min_feasible_budget,
                            "error": e.error,
                            "assignment": {
                                c.device_id: c.layer for c in e.contributions
                            }
                            or None,
                        }
                        for e in report.entries
                    ],
                    "assignments_csv": assignments_path,
                    "contributions_csv": contributions_path,
                },
                indent=2,
            )
        )
    else:
        rows = []
        for e in report.entries:
            if e.status is EntryStatus.OPTIMAL:
                detail = " ".join(f"{c.device_id}:{c.layer}" for c in e.contributions)
                rows.append(
                    [_fmt(e.budget), e.status.value, repr(e.objective), _fmt(e.total_cost), detail]
                )
            elif e.status is EntryStatus.INFEASIBLE:
                rows.append(
                    [
                        _fmt(e.budget),
                        e.status.value,
                        "",
                        "",
                        f"needs budget >= {_fmt(e.min_feasible_budget)}",
                    ]
                )
            else:
                rows.append([_fmt(e.budget), e.status.value, "", "", e.error or ""])
        _print_table(rows, ["budget", "status", "objective", "cost", "detail"])
        print(f"wrote {assignments_path} and {contributions_path}")

    if any(e.status is EntryStatus.ERROR for e in report.entries):
        return EXIT_ERROR
    if all(e.status is EntryStatus.INFEASIBLE for e in report.entries):
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_export_lp(args: argparse.Namespace) -> int:
    instance = _load_single_budget(args.instance)
    text = export_lp(instance)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    instance = _load_single_budget(args.instance)
    outcome = solve(instance, engine=args.engine)
    if not outcome.is_optimal:
        needed = min_feasible_budget(instance)
        print(
            f"infeasible: budget {_fmt(instance.budget)} is below the minimum "
            f"feasible budget {_fmt(needed)}"
        )
        return EXIT_INFEASIBLE
    allocation = outcome.allocation
    assert allocation is not None
    result = estimate_detection(allocation, instance, trials=args.trials, seed=args.seed)
    if result.sample_std_error > 0.0:
        z = (result.mean_detected_weight - allocation.objective) / result.sample_std_error
    else:
        z = 0.0 if result.mean_detected_weight == allocation.objective else float("inf")
    print("status: optimal")
    print(f"objective: {repr(allocation.objective)}")
    print(f"trials: {result.trials}")
    print(f"seed: {result.seed}")
    print(f"mean detected weight: {repr(result.mean_detected_weight)}")
    print(f"std error: {repr(result.sample_std_error)}")
    print(f"z score: {repr(z)}")
    return EXIT_OK


def _parse_budget_list(text: str) -> list[float]:
    items = [part.strip() for part in text.split(",") if part.strip()]
    return [float(part) for part in items]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="layeralloc",
        description="Assign a monitoring depth to every device in a network "
        "under a resource budget, maximizing expected weighted attack detection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_engine(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--engine",
            choices=sorted(ENGINES),
            default=DEFAULT_ENGINE,
            help="solving engine (default: %(default)s)",
        )

    p_solve = sub.add_parser("solve", help="solve one instance (single budget)")
    p_solve.add_argument("instance", help="instance JSON file")
    add_engine(p_solve)
    p_solve.add_argument(
        "--format", choices=["table", "json", "csv"], default="table"
    )
    p_solve.set_defaults(fn=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="solve across a set of budgets")
    p_sweep.add_argument("instance", help="instance JSON file")
    p_sweep.add_argument(
        "--budgets",
        type=_parse_budget_list,
        default=None,
        help="comma-separated budgets overriding the file",
    )
    add_engine(p_sweep)
    p_sweep.add_argument(
        "--output", default=".", help="directory for assignments.csv / contributions.csv"
    )
    p_sweep.add_argument("--format", choices=["table", "json"], default="table")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_export = sub.add_parser("export-lp", help="write the program in LP format")
    p_export.add_argument("instance", help="instance JSON file")
    p_export.add_argument("--output", default=None, help="output path (default: stdout)")
    p_export.set_defaults(fn=cmd_export_lp)

    p_sim = sub.add_parser(
        "simulate", help="solve, then Monte Carlo check the objective"
    )
    p_sim.add_argument("instance", help="instance JSON file")
    p_sim.add_argument("--trials", type=int, default=1_000_000)
    p_sim.add_argument("--seed", type=int, default=0)
    add_engine(p_sim)
    p_sim.set_defaults(fn=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which would collide with the
        # infeasible exit code; fold into the generic error code
        code = exc.code if isinstance(exc.code, int) else EXIT_ERROR
        return EXIT_OK if code == 0 else EXIT_ERROR
    try:
        return args.fn(args)
    except (InstanceFileError, InstanceValidationError, ValueError, OSError) as exc:
        return _fail(str(exc))
    except RuntimeError as exc:
        return _fail(str(exc))


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
