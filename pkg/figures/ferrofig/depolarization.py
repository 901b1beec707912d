"""Mechanical depolarization: P over sigma of the compressive stress run."""

import sys

from .io import FigureSpec
from .scripts import point_csv, run_figure_script


def spec(in_dir, out_dir, variant="linear") -> FigureSpec:
    return FigureSpec(
        input_csv=point_csv(in_dir, f"stress-{variant}"),
        x_column="sigma", y_column="P",
        output_path=f"{out_dir}/depolarization_{variant}.png",
        title=f"Mechanical depolarization ({variant} shape)",
        xlabel="stress sigma", ylabel="polarization P")


def main(argv=None) -> int:
    return run_figure_script(argv, __doc__, spec)


if __name__ == "__main__":
    sys.exit(main())
