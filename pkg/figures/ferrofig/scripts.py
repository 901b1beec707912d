"""Shared command-line plumbing for the one-figure scripts."""

import argparse
import os
import sys

from .io import FigureError, FigureSpec
from .render import render


def point_csv(in_dir: str, scenario: str) -> str:
    return os.path.join(in_dir, scenario, "point_trajectory.csv")


def run_figure_script(argv, describe, build_spec):
    parser = argparse.ArgumentParser(description=describe)
    parser.add_argument("--in", dest="in_dir", default="out",
                        help="directory holding the scenario CSV outputs")
    parser.add_argument("--out", dest="out_dir", default=None,
                        help="directory for the PNG (default: <in>/figures)")
    parser.add_argument("--variant", choices=("linear", "quartic"), default="linear")
    args = parser.parse_args(argv)
    out_dir = args.out_dir or os.path.join(args.in_dir, "figures")
    try:
        path = render(build_spec(args.in_dir, out_dir, args.variant))
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0
