"""Command line front end: sweep CSV in, heatmap image out.

Exit codes: 0 success, 1 usage or data error.
"""

import argparse
import sys

from .plot import PlotSpec, render


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phaseplot",
                     description="Render a completion sweep CSV as a "
                                 "convergence-frequency heatmap.")
    parser.add_argument("--csv", required=True, help="sweep CSV path")
    parser.add_argument("--x", required=True, help="grid column for the x axis")
    parser.add_argument("--y", required=True, help="grid column for the y axis")
    parser.add_argument("--facet", default=None,
                        help="grid column giving one panel per value")
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        spec = PlotSpec(csv=args.csv, x=args.x, y=args.y, facet=args.facet,
                        out=args.out)
        out = render(spec)
    except (UsageError, ValueError, OSError) as exc:
        print(f"phaseplot: error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
