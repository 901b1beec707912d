"""CSV loading and figure specifications."""

import csv
import os
from dataclasses import dataclass

import numpy as np


class FigureError(Exception):
    """Missing file, missing column, or empty data."""


@dataclass(frozen=True)
class FigureSpec:
    """What to plot: CSV source, x/y columns, output image, labels."""

    input_csv: str
    x_column: str
    y_column: str
    output_path: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""


def load_columns(path, names):
    """Columns by name as float arrays; raises FigureError on any defect."""
    if not os.path.exists(path):
        raise FigureError(f"input CSV {path!r} does not exist")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureError(f"input CSV {path!r} is empty") from None
        missing = [n for n in names if n not in header]
        if missing:
            raise FigureError(f"columns {missing} not in {path!r} (header: {header})")
        idx = [header.index(n) for n in names]
        rows = [[float(row[i]) for i in idx] for row in reader if row]
    if not rows:
        raise FigureError(f"input CSV {path!r} has no data rows")
    data = np.asarray(rows)
    return {name: data[:, k] for k, name in enumerate(names)}
