"""Polarization hysteresis loop: P over E of a bipolar field sweep."""

import sys

from .io import FigureSpec
from .scripts import point_csv, run_figure_script


def spec(in_dir, out_dir, variant="linear") -> FigureSpec:
    return FigureSpec(
        input_csv=point_csv(in_dir, f"bipolar-{variant}"),
        x_column="E", y_column="P",
        output_path=f"{out_dir}/polarization_loop_{variant}.png",
        title=f"Polarization hysteresis ({variant} shape)",
        xlabel="electric field E", ylabel="polarization P")


def main(argv=None) -> int:
    return run_figure_script(argv, __doc__, spec)


if __name__ == "__main__":
    sys.exit(main())
