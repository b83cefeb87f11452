"""
Link-level sweeps: BER versus SNR, rotation angle and polarization impairment.
"""
import argparse

from polcipher.commands import build_config, experiment_parent, run_and_emit
from polcipher.services.experiments import ExperimentKind
from polcipher.utils.logger import setup_logger

logger = setup_logger("sweeps")


def _summarize(records) -> None:
    for r in records:
        logger.info(
            f"{r.scheme:>8} {r.role:>9} snr={r.snr_db:g} dB"
            + (f" param={r.parameter:.4g}" if r.parameter is not None else "")
            + f" ber={r.ber:.4e} ({r.errors}/{r.bits})"
        )


def ber_sweep(args: argparse.Namespace) -> int:
    """
    BER of the legitimate receiver and the eavesdropper over SNR.

    Returns:
        Exit status
    """
    cfg = build_config(ExperimentKind.BER_SWEEP, args, {"out": "ber_sweep.csv"})
    _summarize(run_and_emit(cfg))
    return 0


def rotation_sweep(args: argparse.Namespace) -> int:
    """BER over the rotation angle at a fixed SNR."""
    defaults = {"scheme": "rotation", "snr_start": 15.0, "snr_stop": 15.0,
                "out": "rotation_sweep.csv"}
    cfg = build_config(ExperimentKind.ROTATION_SWEEP, args, defaults)
    _summarize(run_and_emit(cfg))
    return 0


def imperfection_sweep(args: argparse.Namespace) -> int:
    """BER and SNR degradation over an impairment grid."""
    defaults = {"impairment": "cross_pol", "snr_start": 15.0, "snr_stop": 15.0,
                "out": "imperfection_sweep.csv"}
    cfg = build_config(ExperimentKind.IMPERFECTION_SWEEP, args, defaults)
    _summarize(run_and_emit(cfg))
    return 0


def register(subparsers) -> None:
    parent = experiment_parent()
    for name, handler, help_text in (
        ("ber-sweep", ber_sweep, "BER versus SNR for a scheme, its eavesdropper and the baseline"),
        ("rotation-sweep", rotation_sweep, "BER versus rotation angle"),
        ("imperfection-sweep", imperfection_sweep, "BER and SNR degradation versus xi"),
    ):
        p = subparsers.add_parser(name, parents=[parent], help=help_text)
        p.set_defaults(handler=handler)
