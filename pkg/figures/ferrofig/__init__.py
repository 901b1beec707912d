"""Figure rendering for ferrohyst CSV outputs: hysteresis loop panels and beam
energy plots, read-only over the CSV files."""

import matplotlib

matplotlib.use("Agg")

from .io import FigureError, FigureSpec, load_columns        # noqa: E402
from .render import build_figure, render                     # noqa: E402

__all__ = ["FigureError", "FigureSpec", "load_columns", "build_figure", "render"]
__version__ = "0.1.0"
