"""Curve rendering with line thickness increasing along the time index, so the
traversal direction of a hysteresis loop is visible."""

import os

import matplotlib.pyplot as plt
import numpy as np

from .io import FigureSpec, load_columns

DPI = 150
_CHUNKS = 12
_WIDTHS = np.linspace(0.6, 2.8, _CHUNKS)


def draw_progressive(ax, x, y, color="tab:blue"):
    """Polyline in segments of growing linewidth (chunks share an endpoint)."""
    n = len(x)
    edges = np.linspace(0, n - 1, _CHUNKS + 1).astype(int)
    for k in range(_CHUNKS):
        lo, hi = edges[k], edges[k + 1] + 1
        ax.plot(x[lo:hi], y[lo:hi], color=color, linewidth=_WIDTHS[k],
                solid_capstyle="round")


def build_figure(spec: FigureSpec):
    """Matplotlib figure for a spec; data errors raise FigureError."""
    data = load_columns(spec.input_csv, [spec.x_column, spec.y_column])
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    draw_progressive(ax, data[spec.x_column], data[spec.y_column])
    ax.set_xlabel(spec.xlabel or spec.x_column)
    ax.set_ylabel(spec.ylabel or spec.y_column)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> str:
    """Write the figure as PNG (150 dpi); returns the output path."""
    fig = build_figure(spec)
    out_dir = os.path.dirname(spec.output_path)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    fig.savefig(spec.output_path, dpi=DPI)
    plt.close(fig)
    return spec.output_path
