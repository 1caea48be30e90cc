"""CLI: render error-band figures from summary CSVs."""

from __future__ import annotations

import argparse
import sys

from .render import PlotError, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clsparse-plots",
        description="Render mean curves with 1-sd bands from summary CSVs",
    )
    parser.add_argument("--csv", action="append", required=True,
                        help="input summary CSV (repeatable)")
    parser.add_argument("--panel", default="param_label",
                        help="column whose values define the panels")
    parser.add_argument("--x", default="budget_fraction")
    parser.add_argument("--y", default="sin_theta_max",
                        help="base metric name; reads <y>_mean and <y>_sd columns")
    parser.add_argument("--out", required=True)
    parser.add_argument("--format", choices=("svg", "png"), default=None,
                        help="default: inferred from --out extension, else svg")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format
    if fmt is None:
        fmt = "png" if args.out.lower().endswith(".png") else "svg"
    spec = PlotSpec(
        csv_paths=tuple(args.csv),
        panel_key=args.panel,
        x=args.x,
        y=args.y,
        out=args.out,
        format=fmt,
    )
    try:
        out = render(spec)
    except (PlotError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
