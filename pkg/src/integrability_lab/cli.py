"""
Command-line front end.

    integrability-lab divergence --p 1.5 --N-list 2,4,8,16 --seed 7
    integrability-lab counterexample --config runs/cx.env --out reports/cx

Configuration is resolved from an optional key = value file, then flags,
then per-subcommand defaults. Exit codes: 0 success, 2 invalid input or
unwritable output, 3 failed acceptance check.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable
from typing import Any

from dotenv import dotenv_values, load_dotenv
from pydantic import ValidationError

from . import __version__
from .constants import frozen_constants
from .dyadic import DyadicGrid, GridFunction, from_csv
from .errors import AcceptanceError, RejectedInputError
from .experiments import (
    approximation_experiment,
    besov_experiment,
    build_psi,
    counterexample_experiment,
    divergence_experiment,
    dominated_convergence_experiment,
    domination_campaign,
    embedding_campaign,
    enforce,
    equivalence_experiment,
)
from .models import BesovParams, CheckedReport, ExperimentConfig, PsiSpec
from .report_logger import write_report, write_table
from .stochint import lipschitz_test_process

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ACCEPTANCE = 3


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def _besov(c: ExperimentConfig) -> CheckedReport:
    if c.input is not None:
        f = from_csv(c.input, c.p)
        default_alpha = 0.5
    else:
        psi = PsiSpec(N=c.N, p=c.p)
        f = GridFunction(DyadicGrid(1.0, c.grid_level), build_psi(psi, c.grid_level).values[:, :, 0], c.p)
        default_alpha = psi.alpha
    alpha = c.alpha if c.alpha is not None else default_alpha
    s = c.s if c.s is not None else alpha / 2.0
    q = c.q if c.q is not None else c.p
    return besov_experiment(f, BesovParams(s=s, p=c.p, q=q, T=f.grid.T), alpha, strict=False)


RUNNERS: dict[str, Callable[[ExperimentConfig], CheckedReport]] = {
    "counterexample": lambda c: counterexample_experiment(
        c.p, c.N, c.grid_level, c.paths, c.seed, c.holder_level, strict=False
    ),
    "divergence": lambda c: divergence_experiment(c.p, c.N_list, c.holder_level, strict=False),
    "equivalence": lambda c: equivalence_experiment(
        c.p, c.N, c.d, c.instances, c.paths, c.seed, c.grid_level,
        deterministic=c.deterministic, refine=c.refine, strict=False,
    ),
    "embedding": lambda c: embedding_campaign(
        c.p, c.instances, c.N, c.grid_level, c.n_max, c.samples, c.seed, strict=False
    ),
    "domination": lambda c: domination_campaign(
        c.p, c.N, c.d, c.grid_level, c.instances, c.samples, c.seed, strict=False
    ),
    "approximation": lambda c: approximation_experiment(
        lipschitz_test_process(DyadicGrid(1.0, c.grid_level), c.N, c.d, c.p),
        c.n_max, c.paths, c.seed, strict=False,
    ),
    "besov": _besov,
    "dominated-convergence": lambda c: dominated_convergence_experiment(
        c.p, c.N, c.d, c.grid_level, c.n_max, c.paths, c.seed, strict=False
    ),
}


def run(config: ExperimentConfig) -> int:
    """Run one experiment, write <out>/<subcommand>.json and .csv, return the exit code."""
    logger.info("Running %s with %s", config.subcommand, config.model_dump(exclude_none=True))
    try:
        report = RUNNERS[config.subcommand](config)
    except (RejectedInputError, ValidationError, OSError) as exc:
        logger.warning("Rejected input: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    document: dict[str, Any] = {
        "config": config.model_dump(mode="json"),
        "constants": frozen_constants(),
        "result": report.model_dump(mode="json"),
        "version": __version__,
    }
    try:
        write_report(config.out, config.subcommand, document)
        write_table(config.out, config.subcommand, report.table_rows())
    except OSError as exc:
        logger.error("Cannot write output to %s: %s", config.out, exc)
        print(f"error: cannot write output to {config.out}: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        enforce(report)
    except AcceptanceError as exc:
        print(f"acceptance failure: {exc}", file=sys.stderr)
        return EXIT_ACCEPTANCE
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

_FLAGS: dict[str, tuple[str, dict[str, Any]]] = {
    "p": ("--p", {"type": float, "help": "target / integrability exponent"}),
    "N": ("--N", {"type": int, "help": "top level or dimension parameter"}),
    "N_list": ("--N-list", {"help": "comma-separated list of N"}),
    "d": ("--d", {"type": int, "help": "noise dimension"}),
    "grid_level": ("--grid-level", {"type": int, "help": "dyadic grid level L"}),
    "paths": ("--paths", {"type": int, "help": "Monte Carlo paths"}),
    "instances": ("--instances", {"type": int, "help": "corpus size"}),
    "n_max": ("--n-max", {"type": int, "help": "top Haar / approximation level"}),
    "samples": ("--samples", {"type": int, "help": "Gaussian samples for gamma-norms"}),
    "holder_level": ("--holder-level", {"type": int, "help": "node level for Hoelder norms"}),
    "input": ("--input", {"help": "grid function CSV"}),
    "s": ("--s", {"type": float, "help": "Besov smoothness"}),
    "q": ("--q", {"type": float, "help": "Besov summability"}),
    "alpha": ("--alpha", {"type": float, "help": "Hoelder exponent"}),
    "refine": ("--refine", {"action": "store_const", "const": True, "help": "repeat at level L + 1"}),
    "deterministic": (
        "--deterministic",
        {"action": "store_const", "const": True, "help": "deterministic instances"},
    ),
}

_SUBCOMMAND_FLAGS: dict[str, tuple[str, ...]] = {
    "counterexample": ("p", "N", "grid_level", "paths", "holder_level"),
    "divergence": ("p", "N_list", "holder_level"),
    "equivalence": ("p", "N", "d", "grid_level", "instances", "paths", "refine", "deterministic"),
    "embedding": ("p", "N", "grid_level", "n_max", "instances", "samples"),
    "domination": ("p", "N", "d", "grid_level", "instances", "samples"),
    "approximation": ("p", "N", "d", "grid_level", "n_max", "paths"),
    "besov": ("p", "N", "grid_level", "input", "s", "q", "alpha"),
    "dominated-convergence": ("p", "N", "d", "grid_level", "n_max", "paths"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--out", help="output directory")

    parser = argparse.ArgumentParser(
        prog="integrability-lab",
        description="Numerical experiments on stochastic integrability in l^p_N.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, fields in _SUBCOMMAND_FLAGS.items():
        sub = subparsers.add_parser(name, parents=[common])
        for field in fields:
            flag, kwargs = _FLAGS[field]
            sub.add_argument(flag, dest=field, default=None, **kwargs)
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values, overridden by flags; unknown keys are rejected."""
    values: dict[str, Any] = {}
    if args.config:
        for key, value in dotenv_values(args.config).items():
            values[key.strip().replace("-", "_")] = value
    for key, value in vars(args).items():
        if key in ("config", "subcommand") or value is None:
            continue
        values[key] = value
    values["subcommand"] = args.subcommand
    return ExperimentConfig.model_validate(values)


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8"):
                pass
        except OSError as exc:
            print(f"error: cannot read config file: {exc}", file=sys.stderr)
            return EXIT_INVALID
    try:
        config = resolve_config(args)
    except ValidationError as exc:
        logger.warning("Invalid configuration: %s", exc)
        print(f"error: invalid configuration\n{exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
