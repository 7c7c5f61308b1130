"""Command line entry point for rendering experiment figures."""

from __future__ import annotations

import argparse
import sys

from cafewall_figures.render import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cafewall-figures",
        description="Render figures from tilt-analysis CSV outputs.",
    )
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   metavar="CSV", help="input CSV file (repeatable)")
    p.add_argument("--kind", required=True, choices=KINDS,
                   help="figure type to render")
    p.add_argument("--out", required=True, metavar="PNG",
                   help="output image path")
    p.add_argument("--ylim", type=float, nargs=2, metavar=("LO", "HI"),
                   help="fixed y-axis limits")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = FigureSpec(
            input_csvs=tuple(args.inputs),
            kind=args.kind,
            out_path=args.out,
            ylim=tuple(args.ylim) if args.ylim else None,
        )
        render(spec)
    except (ValueError, OSError) as exc:
        print(f"cafewall-figures: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
