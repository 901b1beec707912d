"""Butterfly loop: strain over E of a bipolar field sweep."""

import sys

from .io import FigureSpec
from .scripts import point_csv, run_figure_script


def spec(in_dir, out_dir, variant="linear") -> FigureSpec:
    return FigureSpec(
        input_csv=point_csv(in_dir, f"bipolar-{variant}"),
        x_column="E", y_column="eps",
        output_path=f"{out_dir}/butterfly_{variant}.png",
        title=f"Strain butterfly ({variant} shape)",
        xlabel="electric field E", ylabel="strain eps")


def main(argv=None) -> int:
    return run_figure_script(argv, __doc__, spec)


if __name__ == "__main__":
    sys.exit(main())
