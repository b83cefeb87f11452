"""
Stokes-detector statistics subcommands.
"""
import argparse

from polcipher.commands import build_config, experiment_parent, run_and_emit
from polcipher.services.experiments import ExperimentKind
from polcipher.utils.logger import setup_logger

logger = setup_logger("statistics")

DEFAULTS = {"snr_start": -10.0, "snr_stop": 20.0, "snr_step": 5.0, "samples": 1_000_000}


def stokes_stats(args: argparse.Namespace) -> int:
    """Simulated against predicted Stokes means and variances."""
    cfg = build_config(ExperimentKind.STOKES_STATS, args, {**DEFAULTS, "out": "stokes_stats.csv"})
    for r in run_and_emit(cfg):
        aux = dict(r.aux)
        simulated = ", ".join("%.4g" % aux["var%d" % i] for i in range(4))
        predicted = ", ".join("%.4g" % aux["pred_var%d" % i] for i in range(4))
        logger.info(f"snr={r.snr_db:g} dB var=({simulated}) predicted=({predicted})")
    return 0


def snr_transform(args: argparse.Namespace) -> int:
    """Per-parameter output SNR after square-law detection."""
    cfg = build_config(ExperimentKind.SNR_TRANSFORM, args, {**DEFAULTS, "out": "snr_transform.csv"})
    for r in run_and_emit(cfg):
        aux = dict(r.aux)
        logger.info(f"snr={r.snr_db:g} dB SNR0={aux['snr0']:.4g} SNR2={aux['snr2']:.4g}")
    return 0


def register(subparsers) -> None:
    parent = experiment_parent()
    p = subparsers.add_parser("stokes-stats", parents=[parent], help="Stokes moments versus SNR")
    p.set_defaults(handler=stokes_stats)
    p = subparsers.add_parser("snr-transform", parents=[parent], help="Stokes SNR versus input SNR")
    p.set_defaults(handler=snr_transform)
