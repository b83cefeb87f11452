"""
Strength metrics subcommand.
"""
import argparse

from polcipher.commands import build_config, experiment_parent, run_and_emit
from polcipher.services.experiments import ExperimentKind
from polcipher.utils.logger import setup_logger

logger = setup_logger("q_metrics")


def q_metrics(args: argparse.Namespace) -> int:
    """
    Amount of transformation against trace (or theta for rotations).

    Returns:
        Exit status
    """
    cfg = build_config(ExperimentKind.Q_VS_TRACE, args, {"scheme": "none", "out": "q_metrics.csv"})
    records = run_and_emit(cfg)
    violations = sum(
        1 for r in records
        if not dict(r.aux)["q_lower"] - 1e-9 <= dict(r.aux)["q"] <= dict(r.aux)["q_upper"] + 1e-9
    )
    logger.info(f"{len(records)} matrices evaluated, {violations} outside the bounds")
    return 0 if violations == 0 else 1


def register(subparsers) -> None:
    p = subparsers.add_parser("q-metrics", parents=[experiment_parent()],
                              help="amount of transformation and its bounds")
    p.set_defaults(handler=q_metrics)
