"""Driver: regenerate the four figure analogues (polarization loop, butterfly,
mechanical depolarization, stress-strain) from scenario CSVs, producing the
CSVs first through the ferrohyst CLI when they are missing.  Adds the beam
energy plot when a beam report is present."""

import argparse
import os
import subprocess
import sys

from . import beam_energy, butterfly, depolarization, polarization_loop, stress_strain
from .io import FigureError
from .render import render
from .scripts import point_csv

_SCENARIOS = ("bipolar-linear", "bipolar-quartic", "stress-linear", "stress-quartic")
_PANELS = (polarization_loop, butterfly, depolarization, stress_strain)


def ensure_scenario_csv(in_dir: str, scenario: str, fresh: bool = False) -> str:
    """Produce the scenario CSV through the ferrohyst command line interface
    unless it is already present."""
    path = point_csv(in_dir, scenario)
    if fresh or not os.path.exists(path):
        env = {k: v for k, v in os.environ.items() if k != "FERROHYST_OUT"}
        cmd = [sys.executable, "-m", "ferrohyst.cli", "run", scenario,
               "--out-dir", os.path.join(in_dir, scenario)]
        proc = subprocess.run(cmd, capture_output=True, text=True, env=env)
        if proc.returncode != 0:
            raise FigureError(
                f"scenario {scenario!r} failed: {proc.stderr.strip() or proc.stdout.strip()}")
    return path


def make_all(in_dir: str, out_dir: str, variants=("linear", "quartic"),
             fresh: bool = False) -> list:
    written = []
    for variant in variants:
        for scenario in (f"bipolar-{variant}", f"stress-{variant}"):
            ensure_scenario_csv(in_dir, scenario, fresh=fresh)
        for panel in _PANELS:
            written.append(render(panel.spec(in_dir, out_dir, variant)))
    if os.path.exists(os.path.join(in_dir, "beam-demo", "beam_energy.csv")):
        written.append(beam_energy.build(in_dir, out_dir))
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="in_dir", default="out",
                        help="directory holding (or receiving) scenario CSVs")
    parser.add_argument("--out", dest="out_dir", default=None,
                        help="directory for the PNGs (default: <in>/figures)")
    parser.add_argument("--variants", default="linear,quartic",
                        help="comma-separated shape variants to render")
    parser.add_argument("--fresh", action="store_true",
                        help="regenerate scenario CSVs even when present")
    args = parser.parse_args(argv)
    out_dir = args.out_dir or os.path.join(args.in_dir, "figures")
    variants = tuple(v.strip() for v in args.variants.split(",") if v.strip())
    try:
        written = make_all(args.in_dir, out_dir, variants=variants, fresh=args.fresh)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
