"""
Command-line front end.

    python -m topsocle verify --preset hartshorne --lmax 30
    python -m topsocle socle --f "u*x + v*y" --lmin 2 --lmax 8 --plot-table
    python -m topsocle minors --n 2

Report data goes to stdout (or --out); logs go to stderr. Exit codes: 0
success, 1 verification failure, 2 invalid input or configuration.
"""

import argparse
import io
import logging
import sys
from typing import List, Optional, Sequence

from sqlalchemy.exc import SQLAlchemyError

from topsocle import __version__
from topsocle import database
from topsocle.Config import load_settings, settings
from topsocle.algebra.coeff_ring import make_ring
from topsocle.cohomology.socle import star_socle_table
from topsocle.cohomology.top_lc import GradedMap, HypersurfaceF
from topsocle.errors import TopSocleError, UsageError
from topsocle.services.annihilator import ann_family, build_An, default_ring, maximal_minors
from topsocle.services.scenarios import (
    PRESETS,
    Verdict,
    complement_closure_check,
    decide_verdict,
    delta_matrix_check,
    l_ell,
    l_summand_basis,
    load_preset,
    override_ells,
    scenario_from_file,
    vanishing_check,
    verify_theorem,
)
from topsocle.utils import reporters
from topsocle.utils.expressions import parse_generators, parse_matrix
from topsocle.utils.validators import CliConfig, build_cli_config, load_scenario_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _split(text: Optional[str]) -> List[str]:
    return [p.strip() for p in text.split(",") if p.strip()] if text else []


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--char", type=int, dest="characteristic", help="field characteristic, 0 for the rationals")
    g.add_argument("--format", dest="output_format", choices=["csv", "json"], help="report format")
    g.add_argument("--out", help="write the report to this file instead of stdout")
    g.add_argument("--jobs", type=int, help="worker processes for per-ell work")
    g.add_argument("--allow-inconclusive", action="store_true", default=None, help="exit 0 on inconclusive verdicts")
    g.add_argument("--deg-cap", type=int, help="degree cap for ideal checks")
    g.add_argument("--window-cap", type=int, help="hard cap for degree windows")
    g.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    return p


def _ring_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("ring and hypersurface")
    g.add_argument("--backend", choices=["poly", "semigroup"], default="poly")
    g.add_argument("--uvars", default="u,v", help="comma separated u-variables")
    g.add_argument("--generators", help="semigroup generators, e.g. 'u^4,u^3*v,u*v^3,v^4'")
    g.add_argument("--xvars", default="x,y", help="comma separated x-variables")
    g.add_argument("--weights", help="x-weights, searched when omitted")
    g.add_argument("--f", required=True, help="hypersurface, e.g. 'u*x + v*y'")


def create_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser"""
    common = _global_flags()
    parser = argparse.ArgumentParser(
        prog="topsocle",
        description="Graded socles of top local cohomology of hypersurfaces",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="run a preset or scenario file end to end")
    src = verify.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESETS)
    src.add_argument("--config", help="TOML scenario file")
    verify.add_argument("--lmin", type=int)
    verify.add_argument("--lmax", type=int)
    verify.add_argument("--qmax", type=int)
    verify.add_argument("--record-goldens", action="store_true")
    verify.add_argument("--check-goldens", action="store_true")

    socle = sub.add_parser("socle", parents=[common], help="socle table for one f")
    _ring_flags(socle)
    socle.add_argument("--lmin", type=int)
    socle.add_argument("--lmax", type=int, default=10)
    socle.add_argument("--window-lo", type=int)
    socle.add_argument("--window-hi", type=int)
    socle.add_argument("--plot-table", action="store_true", help="long format, one row per degree")

    vanish = sub.add_parser("vanish", parents=[common], help="check the unit-coefficient vanishing criterion")
    _ring_flags(vanish)
    vanish.add_argument("--lmin", type=int)
    vanish.add_argument("--lmax", type=int, default=10)

    lsum = sub.add_parser("lsummand", parents=[common], help="L-summand bases and bidiagonal checks")
    _ring_flags(lsum)
    lsum.add_argument("--qmax", type=int, default=3)

    fam = sub.add_parser("ann-family", parents=[common], help="annihilators of coker A_n")
    fam.add_argument("--n-max", type=int, default=10)
    fam.add_argument("--cap", type=int, default=24)

    minors = sub.add_parser("minors", parents=[common], help="maximal minors of A_n or a given matrix")
    which = minors.add_mutually_exclusive_group(required=True)
    which.add_argument("--n", type=int, help="use A_n")
    which.add_argument("--matrix", help="rows separated by ';', entries by ',' over u,v")
    return parser


def _cli_config(args) -> CliConfig:
    data = {
        "characteristic": settings.characteristic,
        "output_format": settings.output_format,
        "jobs": settings.jobs,
        "allow_inconclusive": settings.allow_inconclusive,
        "deg_cap": settings.deg_cap,
        "window_cap": settings.window_cap,
        "log_level": settings.log_level,
    }
    for key in data:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return build_cli_config(data)


def _ring_from_args(args, cfg: CliConfig):
    u_vars = _split(args.uvars)
    generators = parse_generators(u_vars, _split(args.generators)) if args.generators else ()
    try:
        weights = [int(w) for w in _split(args.weights)] if args.weights else None
    except ValueError:
        raise UsageError(f"--weights must be comma separated integers, got {args.weights!r}")
    return make_ring(args.backend, u_vars, _split(args.xvars), generators, weights, cfg.characteristic)


def _ells(args, f: HypersurfaceF) -> List[int]:
    lmin = args.lmin if args.lmin is not None else f.n
    if lmin > args.lmax:
        raise UsageError(f"empty ell range {lmin}..{args.lmax}")
    return list(range(lmin, args.lmax + 1))


def _cmd_verify(args, cfg: CliConfig, out) -> int:
    data = load_preset(args.preset) if args.preset else load_scenario_file(args.config)
    char = cfg.characteristic if args.characteristic is not None else None
    scenario = override_ells(scenario_from_file(data, char), args.lmin, args.lmax, args.qmax)
    char = scenario.ring.characteristic
    report = verify_theorem(scenario, cfg.jobs, cfg.deg_cap, cfg.window_cap)

    if args.record_goldens or args.check_goldens:
        database.init_db()
    if args.check_goldens:
        discrepancies = database.compare_goldens(report, char)
        for msg in discrepancies:
            logger.error(f"❌ golden mismatch: {msg}")
        report.notes.extend(f"golden: {msg}" for msg in discrepancies)
        report.verdict = decide_verdict(
            report.sop_check, report.support_check, report.socle_table, report.required_ells, discrepancies
        )
    if args.record_goldens:
        database.record_goldens(report, char)
    if args.record_goldens or args.check_goldens:
        database.log_run(report, cfg.jobs)

    if cfg.output_format == "json":
        reporters.write_json(report.to_dict(), out)
    else:
        reporters.write_socle_csv(report.socle_table, out)
    for note in report.notes:
        logger.info(f"note: {note}")

    if report.verdict == Verdict.PASS:
        return EXIT_OK
    if report.verdict == Verdict.INCONCLUSIVE and cfg.allow_inconclusive:
        return EXIT_OK
    return EXIT_FAILED


def _cmd_socle(args, cfg: CliConfig, out) -> int:
    ring = _ring_from_args(args, cfg)
    f = HypersurfaceF.parse(ring, args.f)
    window = None
    if args.window_lo is not None or args.window_hi is not None:
        if args.window_hi is None:
            raise UsageError("--window-lo needs --window-hi")
        window = (args.window_lo or 0, args.window_hi)
    reports = star_socle_table(f, _ells(args, f), window, cfg.jobs, cfg.window_cap)
    if cfg.output_format == "json":
        reporters.write_json([r.to_dict() for r in reports], out)
    elif args.plot_table:
        reporters.write_plot_table(reports, out)
    else:
        reporters.write_socle_csv(reports, out)
    return EXIT_OK


def _cmd_vanish(args, cfg: CliConfig, out) -> int:
    ring = _ring_from_args(args, cfg)
    f = HypersurfaceF.parse(ring, args.f)
    result = vanishing_check(f, _ells(args, f), cfg.window_cap)
    f_bar = str(result.f_bar) if result.f_bar is not None else "0"
    logger.info(f"f mod m = {f_bar}; all pieces zero: {result.all_zero}")
    if cfg.output_format == "json":
        reporters.write_json(
            {"f": str(f), "f_bar": f_bar, "consistent": result.consistent, "coker_totals": result.coker_totals}, out
        )
    else:
        reporters.write_vanish_csv(result.coker_totals, out)
    return EXIT_OK if result.consistent else EXIT_FAILED


def _cmd_lsummand(args, cfg: CliConfig, out) -> int:
    ring = _ring_from_args(args, cfg)
    f = HypersurfaceF.parse(ring, args.f)
    names = ring.x_var_names
    rows = []
    for q in range(args.qmax + 1):
        delta = delta_matrix_check(f, q)
        rows.append({
            "q": q,
            "ell": l_ell(f, q),
            "basis": [b.render(names) for b in l_summand_basis(f, q)],
            "delta_matrix": str(delta.matrix),
            "delta_ok": delta.ok,
            "closure_ok": complement_closure_check(f, q),
        })
    if cfg.output_format == "json":
        reporters.write_json(rows, out)
    else:
        reporters.write_lsummand_csv(rows, out)
    ok = all(r["delta_ok"] and r["closure_ok"] for r in rows)
    return EXIT_OK if ok else EXIT_FAILED


def _cmd_ann_family(args, cfg: CliConfig, out) -> int:
    rows = ann_family(args.n_max, args.cap, default_ring(cfg.characteristic), cfg.jobs)
    if cfg.output_format == "json":
        reporters.write_json(reporters.family_dicts(rows), out)
    else:
        reporters.write_family_csv(rows, out)
    return EXIT_OK


def _cmd_minors(args, cfg: CliConfig, out) -> int:
    ring = default_ring(cfg.characteristic)
    if args.n is not None:
        A = build_An(args.n, ring)
    else:
        A = GradedMap.from_matrix(ring, parse_matrix(ring, args.matrix))
    ideal = maximal_minors(A)
    gens = [str(g) for g in ideal.generators]
    if cfg.output_format == "json":
        reporters.write_json({"generators": gens}, out)
    else:
        reporters.write_generators_csv(gens, out)
    return EXIT_OK


COMMANDS = {
    "verify": _cmd_verify,
    "socle": _cmd_socle,
    "vanish": _cmd_vanish,
    "lsummand": _cmd_lsummand,
    "ann-family": _cmd_ann_family,
    "minors": _cmd_minors,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and return its exit code

    The report is assembled in memory and written only on success, so a
    failing run never leaves a partial output file.
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    try:
        load_settings()
        cfg = _cli_config(args)
    except TopSocleError as e:
        print(f"topsocle: error: {e}", file=sys.stderr)
        return EXIT_INVALID

    logging.basicConfig(
        level=getattr(logging, cfg.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    buffer = io.StringIO()
    try:
        code = COMMANDS[args.command](args, cfg, buffer)
    except TopSocleError as e:
        print(f"topsocle: error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except SQLAlchemyError as e:
        print(f"topsocle: golden store error: {e}", file=sys.stderr)
        return EXIT_INVALID

    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buffer.getvalue())
        except OSError as e:
            print(f"topsocle: error: cannot write {args.out}: {e.strerror or e}", file=sys.stderr)
            return EXIT_INVALID
    else:
        sys.stdout.write(buffer.getvalue())
    return code


def main() -> None:
    sys.exit(run())
