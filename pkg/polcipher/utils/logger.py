"""
Logging for the simulator.

Every module logs through a child of the ``polcipher`` logger, which owns the
only handler; the level is set once from configuration or the CLI.
"""
import logging
import sys

from polcipher.config import Config

ROOT_NAME = "polcipher"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _package_logger() -> logging.Logger:
    root = logging.getLogger(ROOT_NAME)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stdout)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
        root.addHandler(handler)
        root.setLevel(Config.LOG_LEVEL)
    return root


def setup_logger(name: str = ROOT_NAME) -> logging.Logger:
    """
    Logger for one module.

    Args:
        name: Short module name such as "channel", or a dotted name under polcipher

    Returns:
        Child of the package logger; it has no handler of its own
    """
    root = _package_logger()
    if name == ROOT_NAME or name.startswith(ROOT_NAME + "."):
        return logging.getLogger(name)
    return root.getChild(name)


def set_level(level: str) -> None:
    """
    Change the level of every simulator logger.

    Raises:
        ValueError: If the level name is unknown
    """
    _package_logger().setLevel(level.upper())
