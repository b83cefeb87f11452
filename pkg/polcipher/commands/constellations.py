"""
Constellation export subcommand.
"""
import argparse
from pathlib import Path

from polcipher.config import Config
from polcipher.services.constellation import (
    SUPPORTED_SIZES,
    build_constellation,
    labelled_points,
    save_points,
)
from polcipher.utils.logger import setup_logger

logger = setup_logger("constellations")


def export_constellations(args: argparse.Namespace) -> int:
    """Write each requested constellation as sphere_<m>.txt, one point per label."""
    out_dir = Path(args.out_dir)
    for m in args.sizes:
        save_points(labelled_points(build_constellation(m)), out_dir / f"sphere_{m}.txt",
                    header=f"{m} unit Stokes vectors; line k carries label k")
    logger.info(f"Exported {len(args.sizes)} constellations to {out_dir}")
    return 0


def register(subparsers) -> None:
    p = subparsers.add_parser("export-constellations", help="write point sets as text files")
    p.add_argument("--out-dir", default=str(Config.CONSTELLATION_DIR))
    p.add_argument("--sizes", type=int, nargs="+", choices=SUPPORTED_SIZES,
                   default=list(SUPPORTED_SIZES))
    p.set_defaults(handler=export_constellations)
