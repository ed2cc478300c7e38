"""Command line entry point: ``vtolnav simulate|check|plot|baseline``.

Exit status: 0 success, 1 failed check, 2 usage, input or parse errors.
"""

import argparse
import logging
import sys
from pathlib import Path

from ..analysis import check_log
from ..errors import ConfigError, DivergenceError, IncompleteLogError
from .config import load_config, paper_baseline, to_ini
from .plotting import plot
from .runner import run, scenario_meta
from .telemetry import export_csv, import_csv, meta_path

log = logging.getLogger("vtolnav")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser():
    parser = _Parser(prog="vtolnav", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run a scenario and write telemetry CSV")
    p.add_argument("config", help="scenario file or bundled name (paper_baseline)")
    p.add_argument("--out", default="run.csv", help="telemetry CSV path (default run.csv)")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--no-wind", action="store_true")
    p.add_argument("--no-noise", action="store_true",
                   help="noise-free sensors and zero gyro bias")

    p = sub.add_parser("check", help="audit a telemetry CSV or a scenario")
    p.add_argument("source", help="telemetry CSV, scenario file or bundled scenario name")
    p.add_argument("--no-wind", action="store_true")
    p.add_argument("--no-noise", action="store_true")
    p.add_argument("--report", help="write the structured JSON report here")

    p = sub.add_parser("plot", help="render SVG figures from a telemetry CSV")
    p.add_argument("csv")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mass", type=float, help="vehicle mass for the thrust plot (kg)")

    p = sub.add_parser("baseline", help="write the baseline scenario file")
    p.add_argument("path", nargs="?", default="baseline.cfg")
    return parser


def _scenario(source, args):
    cfg = load_config(source)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    if args.no_wind:
        cfg = cfg.without_wind()
    if args.no_noise:
        cfg = cfg.without_noise()
    return cfg


def _cmd_simulate(args):
    cfg = _scenario(args.config, args)
    try:
        run_log = run(cfg)
    except DivergenceError as exc:
        if exc.log is not None:
            export_csv(exc.log, args.out)
        print(f"error: {exc} (partial log in {args.out})", file=sys.stderr)
        return 1
    export_csv(run_log, args.out)
    log.info("wrote %d rows to %s", len(run_log), args.out)
    return 0


def _cmd_check(args):
    src = Path(args.source)
    if src.suffix.lower() == ".csv":
        run_log = import_csv(src)
        if not meta_path(src).is_file():
            log.warning("no %s; assuming the baseline scenario", meta_path(src).name)
            run_log.meta = dict(scenario_meta(paper_baseline()), complete=True,
                                n_rows=len(run_log))
        assert_lyap = True if (args.no_wind and args.no_noise) else None
    else:
        cfg = _scenario(args.source, args)
        run_log = run(cfg)
        assert_lyap = None
    report = check_log(run_log, assert_lyapunov=assert_lyap)
    print(report.to_text())
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n")
    return 0 if report.passed else 1


def _cmd_plot(args):
    for path in plot(args.csv, args.out, mass=args.mass):
        print(path)
    return 0


def _cmd_baseline(args):
    Path(args.path).write_text(to_ini(paper_baseline()))
    print(args.path)
    return 0


COMMANDS = {
    "simulate": _cmd_simulate,
    "check": _cmd_check,
    "plot": _cmd_plot,
    "baseline": _cmd_baseline,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"vtolnav: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, IncompleteLogError, FileNotFoundError, OSError, ValueError) as exc:
        print(f"vtolnav: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
