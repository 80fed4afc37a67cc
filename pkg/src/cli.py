#!/usr/bin/env python3
"""Command line for the bivariate Jacobi polynomials on the triangle and their algebra."""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from triangle_jacobi.v0.exact import AlgebraError, grouped_text
from triangle_jacobi.v0.jacobi1 import rank1_verify, uni_verify_all
from triangle_jacobi.v0.jacobi2 import (
    J,
    bispectral_reports,
    gram,
    verify_orthogonality,
    verify_sactions,
    verify_scalar_action,
)
from triangle_jacobi.v0.relations import (
    AUTO,
    RelationSpec,
    mutation_controls,
    parse_catalogue,
    verify_all,
    verify_jacobi_consequences,
    verify_structures,
    verify_subalgebras,
    verify_symmetry,
)
from triangle_jacobi.v0.report import (
    SAMPLED,
    SYMBOLIC,
    VerificationReport,
    build_document,
    summarize,
)
from triangle_jacobi.v0.shiftalg import in_cone, verify_l3_reconstruction
from triangle_jacobi.v0.weyl import verify_factorizations

from config import Config, RunConfig, load_run_config
from exceptions import CatalogueNotFoundError, ReportWriteError, TriangleJacobiError

logger = logging.getLogger(__name__)

Suite = Callable[[RunConfig, List[RelationSpec]], List[VerificationReport]]


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="\n") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    os.replace(str(tmp), str(path))


def write_report(path: Path, document: Dict) -> None:
    """Write the report document as sorted, indented JSON, replacing any earlier file."""
    try:
        _atomic_write_text(path, json.dumps(document, indent=2, sort_keys=True) + "\n")
    except OSError as e:
        raise ReportWriteError(f"cannot write report {path}: {e.strerror}") from e


def read_catalogue(path: Path) -> Tuple[List[RelationSpec], str]:
    """Parse the catalogue file and return it with the sha256 of its bytes."""
    try:
        content = path.read_bytes()
    except OSError as e:
        raise CatalogueNotFoundError(f"cannot read catalogue {path}: {e.strerror}") from e
    digest = hashlib.sha256(content).hexdigest()
    return parse_catalogue(content.decode("utf-8")), digest


def _relations(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return verify_all(
        catalogue, run.representation, run.mode, run.samples, run.seed, workers=run.workers
    )


def _structure(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return verify_structures(catalogue, run.n_max) + [verify_l3_reconstruction()]


def _subalgebras(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return verify_subalgebras(catalogue, seed=run.seed)


def _symmetry(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return [verify_symmetry(catalogue)]


def _jacobi_identity(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return [verify_jacobi_consequences()]


def _univariate(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return uni_verify_all(run.n_max) + [rank1_verify()]


def _differential(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return (
        verify_factorizations() + verify_sactions(run.n_max) + [verify_scalar_action(run.n_max)]
    )


def _bispectral(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return bispectral_reports(run.n_max)


def _orthogonality(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    mode = SAMPLED
    if run.mode != SAMPLED and run.n_max <= Config.Gram.SYMBOLIC_N_MAX:
        mode = SYMBOLIC
    return [verify_orthogonality(run.n_max, mode, run.samples, run.seed)]


def _mutations(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    return mutation_controls(catalogue)


SUITES: Dict[str, Suite] = {
    Config.Suites.RELATIONS: _relations,
    Config.Suites.STRUCTURE: _structure,
    Config.Suites.SUBALGEBRAS: _subalgebras,
    Config.Suites.SYMMETRY: _symmetry,
    Config.Suites.JACOBI_IDENTITY: _jacobi_identity,
    Config.Suites.UNIVARIATE: _univariate,
    Config.Suites.DIFFERENTIAL: _differential,
    Config.Suites.BISPECTRAL: _bispectral,
    Config.Suites.ORTHOGONALITY: _orthogonality,
    Config.Suites.MUTATIONS: _mutations,
}


def run_suites(run: RunConfig, catalogue: List[RelationSpec]) -> List[VerificationReport]:
    """Run the configured suite, or every suite in order for `all`."""
    names = Config.Suites.ORDER if run.suite == Config.Suites.ALL else (run.suite,)
    reports: List[VerificationReport] = []
    for name in names:
        logger.info("running suite %s", name)
        reports.extend(SUITES[name](run, catalogue))
    if not run.timing:
        reports = [report.without_timing() for report in reports]
    return reports


def cmd_poly(args: argparse.Namespace) -> int:
    """Print J(n, k)."""
    if not in_cone(args.n, args.k):
        logger.error("(n, k) = (%d, %d) is outside 0 <= k <= n", args.n, args.k)
        return Config.ExitCode.USAGE
    poly = J(args.n, args.k)
    print(grouped_text(poly) if args.format == "grouped" else poly.to_text())
    return Config.ExitCode.PASSED


def cmd_gram(args: argparse.Namespace) -> int:
    """Print the Gram matrix of J(n, k) for n <= n_max as a JSON array of rows."""
    mode = Config.Modes.NAMES[args.mode]
    if mode == AUTO:
        mode = SYMBOLIC if args.n_max <= Config.Gram.SYMBOLIC_N_MAX else SAMPLED
    try:
        matrix = gram(args.n_max, mode, args.samples, args.seed)
    except ValueError as e:
        logger.error("%s", e)
        return Config.ExitCode.USAGE
    print(json.dumps(matrix.rows))
    if not matrix.passed:
        logger.error("Gram matrix is not diagonal with the expected norms: %s", matrix.witness)
        return Config.ExitCode.FAILED
    return Config.ExitCode.PASSED


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the selected verification suites and write the JSON report."""
    flags = {
        "nmax": args.nmax,
        "mode": args.mode,
        "samples": args.samples,
        "seed": args.seed,
        "rep": args.rep,
        "suite": args.suite,
        "out": args.out,
        "catalogue": args.catalogue,
        "workers": args.workers,
        "timing": args.timing,
        "log-level": args.log_level,
    }
    run = load_run_config(flags, args.config)
    logging.getLogger().setLevel(run.log_level)
    catalogue, digest = read_catalogue(run.catalogue_path())
    reports = run_suites(run, catalogue)
    document = build_document(reports, run.provenance(), digest)
    if run.output is not None:
        write_report(run.output, document)
        logger.info("report written to %s", run.output)
    summary = summarize(reports)
    logger.info(
        "%d checks: %d passed, %d failed", summary["total"], summary["passed"], summary["failed"]
    )
    return Config.ExitCode.FAILED if summary["failed"] else Config.ExitCode.PASSED


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the poly, verify and gram subcommands."""
    parser = argparse.ArgumentParser(prog="triangle-jacobi", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    poly = commands.add_parser("poly", help="print the polynomial J(n, k)")
    poly.add_argument("n", type=int)
    poly.add_argument("k", type=int)
    poly.add_argument("--format", choices=("grouped", "text"), default="grouped")
    poly.add_argument("--log-level", choices=Config.Logging.LEVELS, default="WARNING")
    poly.set_defaults(handler=cmd_poly)

    verify = commands.add_parser("verify", help="run verification suites")
    verify.add_argument("--nmax", type=int)
    verify.add_argument("--mode", choices=tuple(Config.Modes.NAMES))
    verify.add_argument("--samples", type=int)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--rep", choices=Config.Representations.NAMES)
    verify.add_argument("--suite", choices=Config.Suites.NAMES)
    verify.add_argument("--out", help="report path, empty for none")
    verify.add_argument("--catalogue", help=f"catalogue path, default ${Config.CATALOGUE_ENV}")
    verify.add_argument("--config", type=Path, help="YAML file of option overrides")
    verify.add_argument("--workers", type=int)
    verify.add_argument("--timing", action="store_const", const=True)
    verify.add_argument("--log-level", choices=Config.Logging.LEVELS)
    verify.set_defaults(handler=cmd_verify)

    matrix = commands.add_parser("gram", help="print the Gram matrix up to total degree n_max")
    matrix.add_argument("n_max", type=int)
    matrix.add_argument("--mode", choices=tuple(Config.Modes.NAMES), default="auto")
    matrix.add_argument(
        "--samples", type=int, help="sample points, default one more than the degree bound"
    )
    matrix.add_argument("--seed", type=int, default=42)
    matrix.add_argument("--log-level", choices=Config.Logging.LEVELS, default="WARNING")
    matrix.set_defaults(handler=cmd_gram)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the triangle-jacobi command."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level or "INFO", format=Config.Logging.FORMAT)
    try:
        return args.handler(args)
    except (TriangleJacobiError, AlgebraError, ValueError) as e:
        logger.error("%s", e)
        return Config.ExitCode.USAGE


if __name__ == "__main__":
    sys.exit(main())
