"""Beam energy report: kinetic/stored energy and accumulated dissipation over time."""

import argparse
import os
import sys

import matplotlib.pyplot as plt
import numpy as np

from .io import FigureError, load_columns
from .render import DPI


def build(in_dir, out_dir):
    path = os.path.join(in_dir, "beam-demo", "beam_energy.csv")
    cols = load_columns(path, ["t", "K", "F", "diss_hyst", "diss_visc", "residual"])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    ax1.plot(cols["t"], cols["K"], label="kinetic")
    ax1.plot(cols["t"], cols["F"], label="stored")
    ax1.plot(cols["t"], np.cumsum(cols["diss_hyst"]), label="hysteretic (cum.)")
    ax1.plot(cols["t"], np.cumsum(cols["diss_visc"]), label="viscous (cum.)")
    ax1.set_ylabel("energy")
    ax1.legend(loc="upper left", fontsize=8)
    ax1.grid(True, alpha=0.3)
    ax2.plot(cols["t"], cols["residual"], color="tab:red")
    ax2.set_xlabel("t")
    ax2.set_ylabel("balance residual")
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    out = os.path.join(out_dir, "beam_energy.png")
    os.makedirs(out_dir, exist_ok=True)
    fig.savefig(out, dpi=DPI)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_dir", default="out")
    parser.add_argument("--out", dest="out_dir", default=None)
    args = parser.parse_args(argv)
    out_dir = args.out_dir or os.path.join(args.in_dir, "figures")
    try:
        path = build(args.in_dir, out_dir)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
