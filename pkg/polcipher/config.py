"""
Configuration management for the simulator.
Loads settings from environment variables and config files.
"""
import os
import json
from pathlib import Path

# Load .env file if it exists
try:
    from dotenv import load_dotenv
    # Load from project root directory
    env_path = Path(__file__).parent.parent / ".env"
    if env_path.exists():
        load_dotenv(dotenv_path=env_path, override=False)
except ImportError:
    # python-dotenv not installed, skip .env loading
    pass
except Exception:
    # If loading fails, continue without .env
    pass


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        return default


class Config:
    """Simulator configuration."""

    # Base directory
    BASE_DIR = Path(__file__).parent.parent

    # Load config from JSON
    CONFIG_FILE = BASE_DIR / "config" / "default.json"
    with open(CONFIG_FILE, "r", encoding="utf-8") as f:
        _config_data = json.load(f)

    # Simulation defaults
    DEFAULT_M = _config_data["simulation"]["m"]
    DEFAULT_BLOCK_BITS = _config_data["simulation"]["block_bits"]
    DEFAULT_SNR_START = _config_data["simulation"]["snr_start"]
    DEFAULT_SNR_STOP = _config_data["simulation"]["snr_stop"]
    DEFAULT_SNR_STEP = _config_data["simulation"]["snr_step"]
    DEFAULT_TRIALS = _config_data["simulation"]["trials"]
    DEFAULT_SEED = _config_data["simulation"]["seed"]
    DEFAULT_THETA_STEPS = _config_data["simulation"]["theta_steps"]
    DEFAULT_XI_STEPS = _config_data["simulation"]["xi_steps"]
    DEFAULT_SAMPLES = _config_data["simulation"]["samples"]

    # Tolerances
    ALGEBRAIC_TOL = _config_data["tolerances"]["algebraic"]
    PHYSICAL_TOL = _config_data["tolerances"]["physicality"]
    POLARIZATION_TOL = _config_data["tolerances"]["polarization"]
    HERMITIAN_TOL = _config_data["tolerances"]["hermitian"]

    # Constellation generation
    CONSTELLATION_SEED = _config_data["constellation"]["seed"]
    CONSTELLATION_ITERATIONS = _config_data["constellation"]["iterations"]
    CONSTELLATION_EXPONENTS = tuple(_config_data["constellation"]["exponents"])
    CONSTELLATION_DIR = BASE_DIR / _config_data["constellation"]["data_dir"]

    # Monte-Carlo
    SHARD_SIZE = _config_data["monte_carlo"]["shard_size"]
    TRIAL_SHARD = _config_data["monte_carlo"]["trial_shard"]
    CONFIDENCE = _config_data["monte_carlo"]["confidence"]
    WORKERS = _env_int("POLCIPHER_WORKERS", 1)

    # Output
    FLOAT_FORMAT = _config_data["output"]["float_format"]
    PLOT_FORMAT = _config_data["output"]["plot_format"]

    # Logging
    LOG_LEVEL = os.getenv("POLCIPHER_LOG_LEVEL", _config_data["logging"]["level"]).upper()
