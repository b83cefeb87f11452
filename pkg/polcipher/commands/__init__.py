"""
CLI subcommands. Each module exposes ``register(subparsers)``.
"""
import argparse
from typing import List, Mapping

from polcipher.services.experiments import (
    ExperimentConfig,
    ResultRecord,
    load_config_file,
    resolve_config,
    run_experiment,
)
from polcipher.services.results import emit_csv, emit_plot
from polcipher.utils.logger import setup_logger

logger = setup_logger("commands")

# argparse dest -> configuration key
OVERRIDE_KEYS = {
    "scheme": "scheme",
    "m": "m",
    "snr_start": "snr_start",
    "snr_stop": "snr_stop",
    "snr_step": "snr_step",
    "trials": "trials",
    "block_bits": "block_bits",
    "theta": "theta",
    "theta_steps": "theta_steps",
    "secure_band": "secure_band",
    "impairment": "impairment",
    "xi_re": "xi_re",
    "xi_im": "xi_im",
    "xi_steps": "xi_steps",
    "samples": "samples",
    "eve_wrong": "eve_wrong",
    "baseline": "baseline",
    "seed": "seed",
    "out": "out",
    "plot": "plot",
}


def experiment_parent() -> argparse.ArgumentParser:
    """Flags shared by every experiment subcommand; unset flags stay None."""
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key = value experiment file (flags override it)")
    p.add_argument("--scheme", choices=["golden", "rotation", "opposite", "none"])
    p.add_argument("--m", type=int, help="constellation size (2, 4, 8, 16, 32)")
    p.add_argument("--snr-start", type=float, help="first SNR point in dB")
    p.add_argument("--snr-stop", type=float, help="last SNR point in dB")
    p.add_argument("--snr-step", type=float, help="SNR step in dB")
    p.add_argument("--trials", type=int, help="blocks per experiment point")
    p.add_argument("--block-bits", type=int, help="bits per block")
    p.add_argument("--theta", type=float, help="fixed rotation angle in radians")
    p.add_argument("--theta-steps", type=int, help="points of the theta grid over [0, 2pi)")
    p.add_argument("--secure-band", action="store_const", const=True,
                   help="draw theta from [pi/2, 3pi/2]")
    p.add_argument("--impairment", choices=["cross_pol", "unbalanced"])
    p.add_argument("--xi-re", type=float, help="real part of the far end of the xi grid")
    p.add_argument("--xi-im", type=float, help="imaginary part of the far end of the xi grid")
    p.add_argument("--xi-steps", type=int, help="points of the xi grid")
    p.add_argument("--samples", type=int, help="samples for statistics and metrics")
    p.add_argument("--eve-wrong", action="store_const", const=True,
                   help="add an eavesdropper guessing a random pattern")
    p.add_argument("--no-baseline", dest="baseline", action="store_const", const=False,
                   help="skip the unencrypted reference curve")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--plot", help="plot output path (SVG)")
    return p


def build_config(kind, args: argparse.Namespace, defaults: Mapping[str, object] = None) -> ExperimentConfig:
    """Command defaults < config file < flags."""
    base = dict(defaults or {})
    if getattr(args, "config", None):
        base.update(load_config_file(args.config))
    overrides = {key: getattr(args, dest, None) for dest, key in OVERRIDE_KEYS.items()}
    return resolve_config(kind, base, overrides)


def run_and_emit(cfg: ExperimentConfig) -> List[ResultRecord]:
    """Run an experiment and write its CSV and optional plot."""
    records = run_experiment(cfg)
    emit_csv(records, cfg.out_path)
    if cfg.plot_path:
        emit_plot(records, cfg.plot_path)
    return records
