"""Command-line front end: scenario runs, property-verification suites,
convergence studies, and the beam simulation."""

from __future__ import annotations

import argparse
import csv
import os
import sys

from .errors import FerrohystError
from .scenarios import built_in_names, load_config, run_scenario
from .verify import SUITES, run_suite


def _out_dir(args) -> str:
    return os.environ.get("FERROHYST_OUT") or args.out_dir


def _write_report(path, rows):
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if rows:
            names = list(rows[0].keys())
            writer.writerow(names)
            for row in rows:
                writer.writerow(_fmt(row[c]) for c in names)
    os.replace(tmp, path)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return value if value is not None else ""


def _cmd_run(args) -> int:
    config = load_config(name=args.scenario, path=args.config, out_dir=args.out_dir)
    result = run_scenario(config)
    for kind, path in result["files"].items():
        print(f"{config.name}: wrote {kind} output {path}")
    return 0


def _cmd_verify(args) -> int:
    result = run_suite(args.suite, seed=args.seed, cases=args.cases, bbar=args.bbar)
    out_dir = _out_dir(args)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"verify_{result.name}.csv")
    _write_report(path, result.rows)
    status = "PASS" if result.ok else "FAIL"
    print(f"{status} {result.name}: {result.summary} (report: {path})")
    return 0 if result.ok else 1


def _cmd_convergence(args) -> int:
    from .convergence import run_convergence

    rows = run_convergence(args.target, levels=args.levels)
    out_dir = _out_dir(args)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"convergence_{args.target}.csv")
    _write_report(path, rows)
    for row in rows:
        order = "-" if row["order"] is None else f"{row['order']:.2f}"
        print(f"{row['target']:>14}  level={row['level']:<10}  "
              f"error={row['error']:.3e}  order={order}")
    print(f"report: {path}")
    return 0


def _cmd_beam(args) -> int:
    config = load_config(name="beam-demo", path=args.config, out_dir=args.out_dir)
    result = run_scenario(config)
    for kind, path in result["files"].items():
        print(f"beam: wrote {kind} output {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ferrohyst",
        description="Preisach-based ferroelectric/ferroelastic model: scenarios, "
                    "verification suites, convergence studies, beam solver.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a built-in or configured scenario")
    p_run.add_argument("scenario", nargs="?", default=None,
                       help=f"built-in scenario name ({', '.join(built_in_names())})")
    p_run.add_argument("--config", default=None, help="configuration file")
    p_run.add_argument("--out-dir", default=None, help="output directory")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.set_defaults(fn=_cmd_run)

    p_ver = sub.add_parser("verify", help="run a property-verification suite")
    p_ver.add_argument("suite", choices=sorted(SUITES))
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--cases", type=int, default=None, help="number of random cases")
    p_ver.add_argument("--pairs", type=int, default=None, dest="cases",
                       help="alias for --cases (lipschitz pairs)")
    p_ver.add_argument("--bbar", type=float, default=1.0,
                       help="coefficient bound for the lipschitz suite")
    p_ver.add_argument("--out-dir", default="out")
    p_ver.set_defaults(fn=_cmd_verify)

    p_conv = sub.add_parser("convergence", help="run a refinement ladder")
    p_conv.add_argument("target", choices=("point", "beam"))
    p_conv.add_argument("--levels", type=int, default=4)
    p_conv.add_argument("--out-dir", default="out")
    p_conv.set_defaults(fn=_cmd_convergence)

    p_beam = sub.add_parser("simulate-beam", help="run the beam solver from a config")
    p_beam.add_argument("--config", default=None, help="configuration file")
    p_beam.add_argument("--out-dir", default=None)
    p_beam.add_argument("--seed", type=int, default=0)
    p_beam.set_defaults(fn=_cmd_beam)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except FerrohystError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
