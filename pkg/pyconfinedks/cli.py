import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import JobConfig, load_config
from .runner import (
    compare,
    emit_density,
    emit_potentials,
    execute,
    load_reference,
    read_energies,
    summary_json,
    write_report,
)

logger = logging.getLogger("pyconfinedks")

DEFAULT_OUT = Path("results")


def _configure_logging(out: Path, verbose: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    logger.addHandler(console)

    sidecar = logging.FileHandler(out / "run.log", mode="a", encoding="utf-8")
    sidecar.setFormatter(logging.Formatter("%(asctime)s %(name)s %(levelname)s %(message)s"))
    logger.addHandler(sidecar)


def _out_dir(args: argparse.Namespace, config: JobConfig | None = None) -> Path:
    if args.out:
        return Path(args.out)
    if config is not None and config.out is not None:
        return config.out
    return DEFAULT_OUT


def _job_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, metavar="PATH", help="INI job file")
    parser.add_argument("--out", default=None, metavar="DIR", help="output directory")
    parser.add_argument("--jobs", type=int, default=None, metavar="N", help="worker threads")
    parser.add_argument("--tolerance", type=float, default=None, metavar="X",
                        help="override every reference tolerance (hartree)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pyconfinedks",
        description="Kohn-Sham energies of atoms in an impenetrable spherical cavity.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log SCF iterations")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Solve every term and mode at the first r_c.")
    _job_args(run)
    run.set_defaults(func=_cmd_run)

    scan = subparsers.add_parser("scan", help="Solve over the full r_c ladder.")
    _job_args(scan)
    scan.set_defaults(func=_cmd_scan)

    cmp = subparsers.add_parser("compare", help="Compare an energies CSV with a reference table.")
    cmp.add_argument("--computed", required=True, metavar="CSV")
    cmp.add_argument("--reference", required=True, metavar="NAME|CSV",
                     help="bundled table name (table1, ..., crossing) or CSV path")
    cmp.add_argument("--out", default=None, metavar="DIR")
    cmp.add_argument("--tolerance", type=float, default=None, metavar="X")
    cmp.set_defaults(func=_cmd_compare)

    density = subparsers.add_parser("density", help="Write radial distributions per scan point.")
    _job_args(density)
    density.set_defaults(func=_cmd_density)

    potentials = subparsers.add_parser("potentials", help="Write v_en, v_H, v_x, v_c profiles per scan point.")
    _job_args(potentials)
    potentials.set_defaults(func=_cmd_potentials)

    return parser


# ===== COMMANDS =====

def _cmd_job(args: argparse.Namespace, single: bool) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    _configure_logging(out, args.verbose)
    outcome = execute(config, out, args.jobs, args.tolerance, single=single)
    if single:
        print(summary_json(outcome.rows))
    if outcome.report is not None:
        print(outcome.report.summary())
    return outcome.exit_code


def _cmd_run(args: argparse.Namespace) -> int:
    return _cmd_job(args, single=True)


def _cmd_scan(args: argparse.Namespace) -> int:
    return _cmd_job(args, single=False)


def _cmd_compare(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    _configure_logging(out, args.verbose)
    report = compare(read_energies(args.computed), load_reference(args.reference), args.tolerance)
    write_report(report, out / "comparison.csv")
    print(report.summary())
    for row in report.failures:
        logger.warning("%s %s [%s] r_c=%g %s: %.6f vs %.6f", row.system, row.term,
                       row.mode.value, row.r_c, row.quantity, row.computed, row.reference)
    return 0 if report.passed else 2


def _cmd_density(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    _configure_logging(out, args.verbose)
    return emit_density(config, out, args.jobs).exit_code


def _cmd_potentials(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    out = _out_dir(args, config)
    _configure_logging(out, args.verbose)
    return emit_potentials(config, out, args.jobs).exit_code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
