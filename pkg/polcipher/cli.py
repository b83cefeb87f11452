"""
Command-line interface.
"""
import argparse
import sys
from typing import List, Optional

from polcipher import __version__
from polcipher.commands import constellations, keys, metrics, statistics, sweeps, validate
from polcipher.utils.exceptions import (
    CipherIntegrityError,
    ExperimentConfigError,
    InternalConsistencyError,
    InvalidArgumentError,
    PolarizationDomainError,
    ResultWriteError,
)
from polcipher.utils.logger import set_level, setup_logger

logger = setup_logger("cli")

EXIT_FAILURE = 1
EXIT_USAGE = 2


def create_parser() -> argparse.ArgumentParser:
    """
    Create and configure the argument parser.

    Returns:
        Parser with every subcommand registered
    """
    parser = argparse.ArgumentParser(
        prog="polcipher",
        description="Polarization-domain physical-layer encryption simulator",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        type=str.upper, help="override POLCIPHER_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    # Register subcommands
    sweeps.register(subparsers)
    metrics.register(subparsers)
    statistics.register(subparsers)
    validate.register(subparsers)
    keys.register(subparsers)
    constellations.register(subparsers)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch to the subcommand.

    Returns:
        Process exit status
    """
    args = create_parser().parse_args(argv)
    if args.log_level:
        set_level(args.log_level)
    try:
        return args.handler(args)
    except (ExperimentConfigError, InvalidArgumentError, PolarizationDomainError) as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except (CipherIntegrityError, InternalConsistencyError, ResultWriteError) as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
