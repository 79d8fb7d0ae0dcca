#!/usr/bin/env python3
"""Command-line interface for skomap."""

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import (
    conditions_config,
    cusp_config,
    load_document,
    parse_seeds,
    thorn_config,
    verify_config,
)
from .cusp import box_sequence, check_box_conditions, check_comb_conditions, comb_sequence, variation_experiment
from .errors import (
    BoundaryOrderError,
    ConfigError,
    CsvFormatError,
    GridMismatchError,
    HypothesisError,
    PathDomainError,
    SolverConsistencyError,
)
from .esm import esm_solve, verify_esp
from .pathio import read_path, write_path
from .pathkit import BoundaryPair, align, variation
from .report import Document
from .runner import resolve_threads
from .suites import SUITES, run_suite
from .thorn import excursion_variation_experiment, semimartingale_experiment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class JsonDocument(Document):
    """Wrap a plain dict so it serializes like the report documents."""

    def __init__(self, data: dict):
        self.data = data

    def to_dict(self) -> dict:
        return self.data


def _error(code: int, message: str) -> int:
    print(f"Error: {message}", file=sys.stderr)
    return code


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _summary_path(args, default_name: str) -> Path:
    if args.summary:
        return Path(args.summary)
    return _out_dir(args) / default_name


def _load(args, loader):
    """Load and validate the --config document; raises ConfigError."""
    if not args.config:
        raise ConfigError("/", "this command needs --config FILE")
    return loader(load_document(args.config))


def cmd_solve(args):
    """Solve the map for CSV inputs and write the four output paths."""
    try:
        psi, lower, upper = (read_path(p) for p in (args.psi, args.lower, args.upper))
    except FileNotFoundError as e:
        return _error(EXIT_USAGE, f"File not found: {e.filename}")
    except CsvFormatError as e:
        return _error(EXIT_USAGE, str(e))

    try:
        psi, lower, upper = align(psi, lower, upper)
        bounds = BoundaryPair(lower, upper)
        sol = esm_solve(psi, bounds)
    except GridMismatchError as e:
        return _error(EXIT_USAGE, str(e))
    except (BoundaryOrderError, PathDomainError, SolverConsistencyError) as e:
        return _error(EXIT_DOMAIN, str(e))

    out = _out_dir(args)
    for name in ("phi", "eta", "eta_l", "eta_r"):
        write_path(getattr(sol, name), out / f"{name}.csv")

    T = psi.horizon
    check = verify_esp(sol, psi, bounds, tol=args.tol)
    summary = JsonDocument({
        "points": len(psi.grid),
        "horizon": T,
        "projected_at_zero": sol.projected_at_zero,
        "variation": {name: variation(getattr(sol, name), 0.0, T)
                      for name in ("phi", "eta", "eta_l", "eta_r")},
        "range_check": check.to_dict(),
    })
    dest = summary.write(_summary_path(args, "summary.json"))
    print(f"Wrote {out}/{{phi,eta,eta_l,eta_r}}.csv and {dest}")
    print(f"  Points: {len(psi.grid)}")
    print(f"  Total push: {sol.total_push():.6g}")
    if not check.passed:
        logger.warning("ESP check worst violation %.3g at t=%s",
                       check.worst_violation, check.location)
    return EXIT_OK


def cmd_verify(args):
    """Run a verification suite over a seed range."""
    try:
        if args.config:
            cfg = _load(args, verify_config)
            suite, seeds, tol = cfg.suite, cfg.seeds, cfg.tol
        else:
            if not args.suite:
                return _error(EXIT_USAGE, "give a suite name or --config")
            suite, seeds, tol = args.suite, parse_seeds(args.seeds or "0..99"), None
        if args.seeds and args.config:
            seeds = parse_seeds(args.seeds)
    except ValueError as e:
        return _error(EXIT_USAGE, str(e))
    if args.tol is not None:
        tol = args.tol
    if suite not in SUITES:
        return _error(EXIT_USAGE, f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")

    result = run_suite(suite, seeds, tol, resolve_threads(args.threads))
    text = result.to_json()
    if args.out:
        dest = _out_dir(args) / f"verify_{suite}.json"
        dest.write_text(text, encoding="utf-8")
        print(f"Wrote {dest}", file=sys.stderr)
    print(text, end="")
    if not result.passed:
        print(f"{suite}: {len(result.failures)} of {len(seeds)} instances failed "
              f"(worst {result.worst_violation:.3g} at seed {result.worst_seed})", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _seeds_override(args, seeds):
    return parse_seeds(args.seeds) if args.seeds else seeds


def _write_experiment(args, reports, summary_name: str) -> Path:
    out = _out_dir(args)
    for report in reports:
        path = out / f"{report.experiment.replace('-', '_')}.csv"
        path.write_text(report.to_csv(), encoding="utf-8")
        print(f"Wrote {path}")
    if len(reports) == 1:
        summary = reports[0]
    else:
        summary = JsonDocument({r.experiment: r.to_dict() for r in reports})
    dest = summary.write(_summary_path(args, summary_name))
    print(f"Wrote {dest}")
    for report in reports:
        for label, verdict in report.verdicts.items():
            print(f"  {report.experiment} {label}: {verdict}")
    return dest


def cmd_cusp(args):
    """Variation-vs-resolution sweep over cusp exponents."""
    try:
        cfg = _load(args, cusp_config)
        seeds = _seeds_override(args, cfg.seeds)
    except (ConfigError, ValueError) as e:
        return _error(EXIT_USAGE, str(e))
    try:
        report = variation_experiment(cfg.spec, cfg.alphas, cfg.resolutions, seeds,
                                      cfg.thresholds, cfg.x0, resolve_threads(args.threads))
    except (PathDomainError, BoundaryOrderError) as e:
        return _error(EXIT_DOMAIN, str(e))
    _write_experiment(args, [report], "cusp_summary.json")
    return EXIT_OK


def cmd_thorn(args):
    """Per-excursion and full-horizon sweeps over thorn profiles."""
    try:
        cfg = _load(args, thorn_config)
        seeds = _seeds_override(args, cfg.seeds)
    except (ConfigError, ValueError) as e:
        return _error(EXIT_USAGE, str(e))
    threads = resolve_threads(args.threads)
    reports = []
    try:
        if "excursion" in cfg.experiments:
            reports.append(excursion_variation_experiment(
                cfg.profiles, cfg.resolutions, seeds, cfg.T, cfg.thresholds,
                cfg.threshold_factor, threads))
        if "horizon" in cfg.experiments:
            reports.append(semimartingale_experiment(
                cfg.profiles, cfg.resolutions, seeds, cfg.T, cfg.thresholds, threads))
    except (PathDomainError, BoundaryOrderError) as e:
        return _error(EXIT_DOMAIN, str(e))
    _write_experiment(args, reports, "thorn_summary.json")
    return EXIT_OK


def cmd_check_conditions(args):
    """Check comb and box hypotheses for a boundary family."""
    try:
        cfg = _load(args, conditions_config)
    except ConfigError as e:
        return _error(EXIT_USAGE, str(e))
    tol = args.tol if args.tol is not None else cfg.tol
    results = {}
    try:
        if "comb" in cfg.checks:
            seq = comb_sequence(cfg.spec, cfg.max_points, cfg.min_step)
            results["comb"] = check_comb_conditions(cfg.spec, seq, cfg.c1_comb, tol)
        if "box" in cfg.checks:
            seq = box_sequence(cfg.spec, cfg.max_points, cfg.min_step)
            results["box"] = check_box_conditions(cfg.spec, seq, c1=cfg.c1_box, tol=tol)
    except (HypothesisError, PathDomainError) as e:
        return _error(EXIT_DOMAIN, str(e))

    summary = JsonDocument({"spec": cfg.spec.to_dict(),
                            "checks": {name: r.to_dict() for name, r in results.items()}})
    dest = summary.write(_summary_path(args, "conditions_summary.json"))
    print(f"Wrote {dest}")
    for name, r in results.items():
        state = "hold" if r.passed else "fail"
        print(f"  {name}: hypotheses {state} (c1 needed {r.detail['c1_needed']:.4g})")
    return EXIT_OK if all(r.passed for r in results.values()) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='skomap',
        description='Extended Skorokhod map on a time-dependent interval',
    )
    parser.add_argument('--version', action='version', version=f'skomap {__version__}')
    parser.add_argument('-v', '--verbose', action='store_true', help='Debug logging')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--out', default='.', help='Output directory (default: .)')
    common.add_argument('--summary', help='Summary file; .yaml/.yml writes YAML')
    common.add_argument('--threads', type=int, help='Worker processes (default: $SKOMAP_THREADS or 1)')
    common.add_argument('--tol', type=float, help='Violation tolerance')
    common.add_argument('--seeds', help='Seeds: N, N..M (inclusive) or a comma list')
    common.add_argument('--config', help='JSON or YAML config file')

    subparsers = parser.add_subparsers(dest='command', help='Commands')

    p_solve = subparsers.add_parser('solve', parents=[common], help='Solve the map for CSV paths')
    p_solve.add_argument('psi', help='Input path CSV')
    p_solve.add_argument('lower', help='Lower boundary CSV')
    p_solve.add_argument('upper', help='Upper boundary CSV (inf allowed)')
    p_solve.set_defaults(func=cmd_solve, tol=1e-9)

    p_verify = subparsers.add_parser('verify', parents=[common], help='Run a verification suite')
    p_verify.add_argument("suite", nargs="?", help=f"Suite name ({', '.join(SUITES)})")
    p_verify.set_defaults(func=cmd_verify, out=None)

    p_cusp = subparsers.add_parser('cusp', parents=[common], help='Cusp variation sweep')
    p_cusp.set_defaults(func=cmd_cusp)

    p_thorn = subparsers.add_parser('thorn', parents=[common], help='Thorn variation sweeps')
    p_thorn.set_defaults(func=cmd_thorn)

    p_cond = subparsers.add_parser('check-conditions', parents=[common],
                                   help='Check comb/box hypotheses for a boundary family')
    p_cond.set_defaults(func=cmd_check_conditions)

    return parser


def main(argv=None):
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format=LOG_FORMAT, stream=sys.stderr)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    return args.func(args)


if __name__ == '__main__':
    sys.exit(main())
