"""
Invariant suite subcommand.
"""
import argparse

from polcipher.commands import build_config, experiment_parent, run_and_emit
from polcipher.services.experiments import ExperimentKind
from polcipher.utils.logger import setup_logger

logger = setup_logger("validate")


def validate(args: argparse.Namespace) -> int:
    """
    Run every check and report.

    Returns:
        0 when all checks pass, 1 otherwise
    """
    cfg = build_config(ExperimentKind.VALIDATE, args, {"out": "validate.csv"})
    records = run_and_emit(cfg)
    failed = [r.experiment.split("/", 1)[-1] for r in records if dict(r.aux)["passed"] == 0.0]
    if failed:
        logger.error(f"{len(failed)} of {len(records)} checks failed: {', '.join(failed)}")
        return 1
    logger.info(f"All {len(records)} checks passed")
    return 0


def register(subparsers) -> None:
    p = subparsers.add_parser("validate", parents=[experiment_parent()],
                              help="run the invariant suite")
    p.set_defaults(handler=validate)
