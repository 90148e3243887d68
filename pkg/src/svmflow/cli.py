"""Command-line entry points.

    svm run --case N | --config PATH [--nx N --ny N --tend T --cfl C
                                      --outdir DIR --snap-every DT]
    svm slice SNAPSHOT.csv --axis x|y --at VALUE [--out PATH]

Exit codes: 0 success, 2 configuration/usage error, 3 solver failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import ConfigError, SimConfig, load_config
from .fv2d import StepError
from .output import (SLICE_COLUMNS, SnapshotSchemaError, read_snapshot,
                     slice_from_snapshot)
from .run import run_simulation

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svm",
                                     description="viscoelastic shallow-water solver")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a simulation")
    src = run_p.add_mutually_exclusive_group(required=True)
    src.add_argument("--case", choices=["1", "2", "3", "4"],
                     help="reference experiment id")
    src.add_argument("--config", help="configuration file path")
    run_p.add_argument("--nx", type=int)
    run_p.add_argument("--ny", type=int)
    run_p.add_argument("--tend", type=float)
    run_p.add_argument("--cfl", type=float)
    run_p.add_argument("--outdir", default=None)
    run_p.add_argument("--snap-every", type=float, dest="snap_every")
    run_p.add_argument("--vtk", action="store_true")

    slice_p = sub.add_parser("slice", help="extract a 1D profile from a snapshot")
    slice_p.add_argument("snapshot")
    slice_p.add_argument("--axis", choices=["x", "y"], required=True)
    slice_p.add_argument("--at", type=float, required=True)
    slice_p.add_argument("--out", default=None)
    return parser


def _cmd_run(args) -> int:
    try:
        if args.config:
            cfg = load_config(args.config)
        else:
            from .presets import default_config
            cfg = default_config(args.case)
        for name, attr in (("nx", "nx"), ("ny", "ny"), ("tend", "t_end"),
                           ("cfl", "cfl_factor"), ("outdir", "outdir"),
                           ("snap_every", "snap_every")):
            value = getattr(args, name)
            if value is not None:
                setattr(cfg, attr, value)
        if args.vtk:
            cfg.vtk = True
        cfg.validate()
    except (ConfigError, OSError, ValueError) as exc:
        print(f"svm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        summary = run_simulation(cfg)
    except StepError as exc:
        print(f"svm: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"svm: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO

    print(f"case {summary['case']}: {summary['steps']} steps to "
          f"t={summary['final_time']:.6f}, min H={summary['min_H']:.6e}, "
          f"max drift={summary['max_involution_drift']:.3e}")
    return EXIT_OK


def _cmd_slice(args) -> int:
    try:
        columns = read_snapshot(args.snapshot)
    except OSError as exc:
        print(f"svm: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SnapshotSchemaError, ValueError) as exc:
        print(f"svm: bad snapshot: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        table = slice_from_snapshot(columns, args.axis, args.at)
    except ValueError as exc:
        print(f"svm: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    lines = [",".join(SLICE_COLUMNS)]
    lines += [",".join("%.12e" % v for v in row) for row in table]
    text = "\n".join(lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"svm: i/o error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    np.seterr(over="ignore", invalid="ignore")
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_slice(args)


if __name__ == "__main__":
    sys.exit(main())
