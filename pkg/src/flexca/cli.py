"""Command-line front end: validate scenarios, execute runs, drive sweeps.

Exit codes: 0 success, 2 parse failure, 3 validation failure, 4 runtime
failure. Output files are written atomically (tmp file + rename), so a
failed invocation never leaves a partial file behind. A relative --out
path resolves under $FLEXCA_OUT_DIR when that variable is set.
"""

import argparse
import json
import os
import statistics
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import engine, scenario as scenario_io, sweeps
from .errors import (
    AxisMismatch,
    FlexCaError,
    ParseError,
    RuUnreachable,
    ScenarioInvalid,
    ValidationFailed,
)
from .pdcch import GAIN_CSV_HEADER

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RUNTIME = 4

AXES = ("n_cells", "ru", "framework")
AXIS_EXPERIMENT = {
    "n_cells": "pdcch_blocking",
    "ru": "scell_energy",
    "framework": "txswitch_upt",
}


def _resolve_out(path_str: str) -> Path:
    path = Path(path_str)
    base = os.environ.get("FLEXCA_OUT_DIR")
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        _write_atomic(_resolve_out(out), text)


# -- validate ---------------------------------------------------------------------

def cmd_validate(args) -> int:
    scenario = scenario_io.load(args.scenario)
    diagnostics = engine.validate_scenario(scenario)
    if diagnostics:
        for diag in diagnostics:
            print(diag)
        raise ValidationFailed(diagnostics)
    print(f"{scenario.name}: ok "
          f"({len(scenario.plan.configured_cells)} cells, "
          f"{len(scenario.catalog.carriers)} carriers)")
    return EXIT_OK


# -- run --------------------------------------------------------------------------

def cmd_run(args) -> int:
    scenario = scenario_io.load(args.scenario)
    seed = scenario.seed if args.seed is None else args.seed
    report = engine.run(scenario, seed=seed)
    doc = {"scenario": scenario.name, "experiment": scenario.experiment}
    if args.seed is None:
        doc["seed_source"] = f"default ({scenario.seed})"
    doc.update(report.to_dict())
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


# -- sweep ------------------------------------------------------------------------

def _blocking_task(payload):
    scenario, seed = payload
    return [(row.n_cells, seed, row) for row in sweeps.blocking_sweep(scenario, seed)]


def _ru_task(payload):
    scenario, target, seed = payload
    return [(target, seed, sweeps.energy_saving_gain(scenario, target, seed))]


def _framework_task(payload):
    scenario, framework, seed = payload
    variant = sweeps.scenario_with_framework(scenario, framework)
    report = engine.run(variant, seed=seed)
    row = sweeps.FrameworkRow(framework, seed, report.mean_upt_mbps,
                              report.served_bits, report.blocking_rate)
    return [(framework, seed, row)]


def _run_tasks(task_fn, payloads, jobs: int):
    results = []
    if jobs <= 1:
        for payload in payloads:
            results.extend(task_fn(payload))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(task_fn, payloads):
                results.extend(chunk)
    # stable order regardless of scheduling
    results.sort(key=lambda item: (str(item[0]), item[1]))
    return results


def _aggregate(values: list[float]) -> tuple[float, float]:
    mean = statistics.fmean(values)
    if len(values) < 2:
        return mean, 0.0
    half_width = 1.96 * statistics.stdev(values) / (len(values) ** 0.5)
    return mean, half_width


def cmd_sweep(args) -> int:
    scenario = scenario_io.load(args.scenario)
    if args.axis not in AXES:
        raise AxisMismatch(f"axis must be one of {AXES}")
    expected = AXIS_EXPERIMENT[args.axis]
    if scenario.experiment != expected:
        raise AxisMismatch(
            f"axis {args.axis} applies to {expected} scenarios; "
            f"{scenario.name} is {scenario.experiment}")
    seeds = list(range(scenario.seed, scenario.seed + args.seeds))

    lines: list[str] = []
    if args.axis == "n_cells":
        lines.append("n_cells,seed," + GAIN_CSV_HEADER.split(",", 1)[1])
        results = _run_tasks(_blocking_task,
                             [(scenario, seed) for seed in seeds], args.jobs)
        by_axis: dict[int, list] = {}
        for n_cells, seed, row in results:
            lines.append(f"{n_cells},{seed}," +
                         row.csv_row().split(",", 1)[1])
            by_axis.setdefault(n_cells, []).append(row)
        for n_cells in sorted(by_axis):
            rows = by_axis[n_cells]
            fields = []
            for attr in ("blocking_sc", "blocking_mc", "blocking_gain",
                         "cce_sc", "cce_mc", "cce_saving_gain"):
                mean, ci = _aggregate([getattr(r, attr) for r in rows])
                fields.append((mean, ci))
            lines.append(f"{n_cells},mean," +
                         ",".join(f"{m:.6f}" for m, _ in fields))
            lines.append(f"{n_cells},ci95," +
                         ",".join(f"{c:.6f}" for _, c in fields))
    elif args.axis == "ru":
        targets = [float(x) for x in
                   scenario.params.get("ru_grid", [0.05, 0.10, 0.20, 0.375])]
        lines.append("ru_target,seed," + sweeps.RU_CSV_HEADER)
        results = _run_tasks(
            _ru_task,
            [(scenario, target, seed) for target in targets for seed in seeds],
            args.jobs)
        by_axis = {}
        for target, seed, row in results:
            lines.append(f"{target},{seed}," + row.csv_row())
            by_axis.setdefault(target, []).append(row)
        for target in sorted(by_axis):
            rows = by_axis[target]
            fields = []
            for attr in ("ru_achieved", "energy_withssb", "energy_ssbless",
                         "gain", "mean_upt_withssb", "mean_upt_ssbless"):
                mean, ci = _aggregate([getattr(r, attr) for r in rows])
                fields.append((mean, ci))
            lines.append(f"{target},mean," +
                         ",".join(f"{m:.6f}" for m, _ in fields))
            lines.append(f"{target},ci95," +
                         ",".join(f"{c:.6f}" for _, c in fields))
    else:
        lines.append(sweeps.FRAMEWORK_CSV_HEADER)
        results = _run_tasks(
            _framework_task,
            [(scenario, framework, seed)
             for framework in sweeps.FRAMEWORK_ORDER for seed in seeds],
            args.jobs)
        by_axis = {}
        for framework, seed, row in results:
            lines.append(row.csv_row())
            by_axis.setdefault(framework, []).append(row)
        for framework in sweeps.FRAMEWORK_ORDER:
            rows = by_axis.get(framework, [])
            if not rows:
                continue
            for label, picker in (("mean", 0), ("ci95", 1)):
                fields = []
                for attr in ("mean_upt_mbps", "served_bits", "blocking_rate"):
                    agg = _aggregate([getattr(r, attr) for r in rows])
                    fields.append(agg[picker])
                lines.append(f"{framework},{label}," +
                             ",".join(f"{v:.6f}" for v in fields))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flexca",
        description="Flexible carrier-aggregation system simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a scenario file")
    p_validate.add_argument("scenario")
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="execute one simulation run")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep an axis over seeds")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--axis", required=True, choices=AXES)
    p_sweep.add_argument("--seeds", type=int, default=1,
                         help="number of seeds, starting at the scenario seed")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", default=None)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationFailed, ScenarioInvalid, AxisMismatch) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FlexCaError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
