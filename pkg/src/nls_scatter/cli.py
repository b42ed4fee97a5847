"""``nls-scatter`` command line: sweep, figure, point, verify."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import tables
from .config import ConfigError, figure_config, figure_document, load_config
from .scattering import DegenerateDenominator, KTooSmall, solve_energy
from .ode import IntegrationError
from .sweep import SweepFailed, run_sweep, theorem_report

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_SWEEP_FAILED = 3

log = logging.getLogger("nls_scatter")


def _summary_lines(table):
    s = table.summary
    fmt = tables.fmt
    lines = [
        f"points: {s['n_points']}  failed: {s['n_failed']}  unconverged: {s['n_unconverged']}",
        f"max |R_left - R_right|: {fmt(s['max_dR'])}",
        f"max |T_left - T_right|: {fmt(s['max_dT'])}",
        f"max |R+T - 1| (left):  {fmt(s['max_defect_left'])}",
        f"max |R+T - 1| (right): {fmt(s['max_defect_right'])}",
    ]
    if s["max_dW"] is not None:
        lines.append(f"max |W1 - W2|:         {fmt(s['max_dW'])}")
    return lines


def _run_and_write(run, csv_path, plot_path, title, workers):
    try:
        table = run_sweep(run.sweep, workers=workers)
    except SweepFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None
    tables.write_csv(table, csv_path)
    if plot_path:
        png = os.path.splitext(os.path.basename(csv_path))[0] + ".png"
        with open(plot_path, "w", encoding="utf-8") as fh:
            fh.write(tables.plot_script(os.path.basename(csv_path), png, title,
                                        os.path.basename(plot_path)))
    for line in _summary_lines(table):
        print(line)
    if run.sweep.annotate_theorems:
        print(theorem_report(table, run.sweep.config).format())
    return table


def cmd_sweep(args) -> int:
    try:
        run = load_config(args.config, force_linear=args.linear)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = args.out or run.csv_path
    if not out:
        print("config error: no output path (--out or output.csv)", file=sys.stderr)
        return EXIT_INVALID
    workers = args.workers or run.workers
    table = _run_and_write(run, out, args.plot_script or run.plot_script_path,
                           os.path.basename(args.config), workers)
    return EXIT_OK if table is not None else EXIT_SWEEP_FAILED


def cmd_figure(args) -> int:
    try:
        doc = figure_document(args.n)
        if args.show_config:
            print(json.dumps(doc, indent=2))
            return EXIT_OK
        run = figure_config(args.n, force_linear=args.linear)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, f"figure{args.n}.csv")
    plot_path = os.path.join(args.out_dir, f"figure{args.n}.gp")
    table = _run_and_write(run, csv_path, plot_path, f"figure {args.n}", args.workers)
    if table is None:
        return EXIT_SWEEP_FAILED
    print(f"wrote {csv_path} and {plot_path}")
    return EXIT_OK


def cmd_point(args) -> int:
    try:
        run = load_config(args.config, force_linear=args.linear)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        r = solve_energy(run.sweep.config, args.energy)
    except KTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (IntegrationError, DegenerateDenominator) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SWEEP_FAILED
    fmt = tables.fmt
    ep = r.endpoint
    for name, value in [("E", r.E), ("k", r.k), ("R_left", r.R_left), ("R_right", r.R_right),
                        ("T_left", r.T_left), ("T_right", r.T_right), ("sum_left", r.sum_left),
                        ("sum_right", r.sum_right), ("W1", ep.W1), ("W2", ep.W2)]:
        print(f"{name:<10} {fmt(value)}")
    for name, z in [("r_left", r.r_left), ("r_right", r.r_right),
                    ("t_left", r.t_left), ("t_right", r.t_right)]:
        print(f"{name:<10} {fmt(z.real)} {fmt(z.imag)}j")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_battery

    try:
        checks = run_battery(force_linear=args.linear)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for check in checks:
        print(check.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nls-scatter", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="energy sweep from a JSON config, written as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--plot-script")
    p.add_argument("--workers", type=int)
    p.add_argument("--linear", action="store_true", help="force gamma = 0")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="run a built-in figure fixture (1-5)")
    p.add_argument("n", type=int)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--show-config", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--linear", action="store_true", help="force gamma = 0")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("point", help="amplitudes at a single energy")
    p.add_argument("--config", required=True)
    p.add_argument("--energy", type=float, required=True)
    p.add_argument("--linear", action="store_true", help="force gamma = 0")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("verify", help="run the oracle battery")
    p.add_argument("--linear", action="store_true", help="force gamma = 0 in every fixture")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
