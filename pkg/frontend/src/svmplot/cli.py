"""Plot CLI: ``plot slices|field|energy|surface --in GLOB --out PATH``."""

from __future__ import annotations

import argparse
import sys

from .figures import plot_energy, plot_slices, plot_surface, plot_vector_field
from .readers import SchemaError, expand


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plot",
                                     description="solver output figures")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("slices", "4-panel profile figure"),
                        ("field", "velocity quiver"),
                        ("energy", "energy time series"),
                        ("surface", "depth surface")):
        cmd = sub.add_parser(name, help=help_)
        cmd.add_argument("--in", dest="pattern", required=True,
                         help="input file or glob")
        cmd.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        paths = expand(args.pattern)
        if args.command == "slices":
            plot_slices(paths, args.out)
        elif args.command == "field":
            plot_vector_field(paths[-1], args.out)
        elif args.command == "surface":
            plot_surface(paths[-1], args.out)
        else:
            plot_energy(paths[-1], args.out)
    except FileNotFoundError as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 2
    except SchemaError as exc:
        print(f"plot: schema error: {exc}", file=sys.stderr)
        return 3
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
