"""Command line front end.

Subcommands:
    gen        write a seeded instance (tensors, bases, samples) to a directory
    solve      run one completion and print the result row
    sweep      run a grid of completions to CSV, optionally in parallel
    summarize  reduce a sweep CSV to per-cell convergence frequencies

Exit codes: 0 success, 1 usage or configuration error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

from .harness import (CSV_COLUMNS, SCHEMA_LINE, InstanceSpec, generate_instance,
                      generate_target, load_sweep_config, run_single, run_sweep,
                      summarize, sweep_config_from_dict, write_summary)
from .serialization import save_samples, save_side_info, save_tt
from .solver import ALGORITHMS, NumericalAbort, SolverConfig


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; remap that to exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _load_instance_config(path, seed_override=None):
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    solver_data = data.pop("solver", {})
    if seed_override is not None:
        data["seed"] = seed_override
    data.setdefault("seed", 0)
    if "omega" in data:
        data["omega_size"] = data.pop("omega")
    spec_names = {f.name for f in dataclass_fields(InstanceSpec)}
    unknown = set(data) - spec_names
    if unknown:
        raise UsageError(f"unknown instance parameters: {sorted(unknown)}")
    try:
        spec = InstanceSpec(**data)
        config = SolverConfig(**solver_data)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))
    return spec, config


def _cmd_gen(args):
    spec, _ = _load_instance_config(args.config, args.seed)
    problem = generate_instance(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_tt(generate_target(spec), out / "target.tt")
    save_tt(problem.initial, out / "initial.tt")
    save_side_info(problem.side, out / "side.si")
    save_samples(problem.train, out / "train.sp")
    save_samples(problem.test, out / "test.sp")
    print(f"wrote instance seed={spec.seed} to {out}")
    return 0


def _cmd_solve(args):
    spec, config = _load_instance_config(args.config, args.seed)
    record, _ = run_single(spec, config, algorithm=args.algorithm)
    print(SCHEMA_LINE)
    print(",".join(CSV_COLUMNS))
    print(record.to_csv_row())
    if args.out is not None:
        fresh = not Path(args.out).exists() or Path(args.out).stat().st_size == 0
        with open(args.out, "a", encoding="utf-8") as f:
            if fresh:
                f.write(SCHEMA_LINE + "\n")
                f.write(",".join(CSV_COLUMNS) + "\n")
            f.write(record.to_csv_row() + "\n")
    return 0


def _cmd_sweep(args):
    try:
        config = load_sweep_config(args.config)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}")
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc))
    if args.seed is not None:
        config = sweep_config_from_dict({
            "axes": config.axes, "fixed": config.fixed, "trials": config.trials,
            "base_seed": args.seed, "out": config.out,
            "solver": {f.name: getattr(config.solver, f.name)
                       for f in dataclass_fields(SolverConfig)},
        })

    def progress(record):
        print(record.to_csv_row(), file=sys.stderr)

    out_path = run_sweep(config, threads=args.threads, resume=args.resume,
                         out=args.out, progress=progress if args.verbose else None)
    print(f"sweep complete: {out_path}")
    return 0


def _cmd_summarize(args):
    try:
        rows = summarize(args.csv)
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc}")
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as f:
            write_summary(rows, f)
    else:
        write_summary(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rttc",
                     description="Tensor completion on the fixed TT-rank manifold.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="write a seeded instance to a directory")
    p_gen.add_argument("--config", required=True, help="instance JSON")
    p_gen.add_argument("--seed", type=int, default=None, help="override config seed")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.set_defaults(func=_cmd_gen)

    p_solve = sub.add_parser("solve", help="run one completion")
    p_solve.add_argument("--config", required=True, help="instance JSON")
    p_solve.add_argument("--seed", type=int, default=None, help="override config seed")
    p_solve.add_argument("--algorithm", choices=ALGORITHMS, default="rttc-si")
    p_solve.add_argument("--out", default=None, help="append the row to this CSV")
    p_solve.set_defaults(func=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a sweep to CSV")
    p_sweep.add_argument("--config", required=True, help="sweep JSON")
    p_sweep.add_argument("--seed", type=int, default=None, help="override base seed")
    p_sweep.add_argument("--out", default=None, help="output CSV (default from config)")
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--resume", action="store_true",
                         help="skip rows already present in the output CSV")
    p_sweep.add_argument("--verbose", action="store_true",
                         help="print each finished row to stderr")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_sum = sub.add_parser("summarize", help="per-cell convergence frequencies")
    p_sum.add_argument("csv", help="sweep CSV")
    p_sum.add_argument("--out", default=None, help="write table here instead of stdout")
    p_sum.set_defaults(func=_cmd_summarize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"rttc: error: {exc}", file=sys.stderr)
        return 1
    except FileExistsError as exc:
        print(f"rttc: error: {exc}", file=sys.stderr)
        return 1
    except NumericalAbort as exc:
        print(f"rttc: numerical abort: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
