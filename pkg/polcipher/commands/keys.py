"""
Key exchange between transmitter and receiver invocations.
"""
import argparse
from pathlib import Path

import numpy as np

from polcipher.config import Config
from polcipher.services.constellation import build_constellation
from polcipher.services.encipherment import (
    CipherContext,
    decrypt,
    encrypt,
    pattern_from_record,
    pattern_to_record,
    random_pattern,
    SecretPattern,
)
from polcipher.services.results import read_jones_csv, write_jones_csv
from polcipher.utils.exceptions import InvalidArgumentError, ResultWriteError
from polcipher.utils.logger import setup_logger
from polcipher.utils.rng import stream

logger = setup_logger("keys")


def _read_key(path) -> SecretPattern:
    try:
        record = Path(path).read_text(encoding="utf-8").strip()
    except OSError as e:
        raise InvalidArgumentError(f"Cannot read key file {path}: {e}") from e
    return pattern_from_record(record)


def _parse_bits(text: str) -> np.ndarray:
    text = "".join(text.split())
    if not text or set(text) - {"0", "1"}:
        raise InvalidArgumentError("bits must be a non-empty string of 0 and 1")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")


def keygen(args: argparse.Namespace) -> int:
    """Draw a secret pattern and write its record."""
    seed = args.seed if args.seed is not None else np.random.SeedSequence().entropy
    pattern = random_pattern(args.scheme, stream(seed), theta=args.theta,
                             secure_band=args.secure_band)
    record = pattern_to_record(pattern)
    if args.out:
        try:
            Path(args.out).write_text(record + "\n", encoding="utf-8")
        except OSError as e:
            raise ResultWriteError(f"Failed to write key to {args.out}: {e}") from e
        logger.info(f"Wrote {pattern.scheme.value} key to {args.out}")
    else:
        print(record)
    return 0


def transmit(args: argparse.Namespace) -> int:
    """Encrypt a bit string into cipherfield Jones vectors."""
    ctx = CipherContext.from_pattern(_read_key(args.key), build_constellation(args.m))
    if args.bits_file:
        try:
            text = Path(args.bits_file).read_text(encoding="utf-8")
        except OSError as e:
            raise InvalidArgumentError(f"Cannot read bits file {args.bits_file}: {e}") from e
    else:
        text = args.bits or ""
    jones = encrypt(ctx, _parse_bits(text))
    write_jones_csv(jones, args.out)
    logger.info(f"Wrote {len(jones)} symbols to {args.out}")
    return 0


def receive(args: argparse.Namespace) -> int:
    """Decrypt Jones vectors back into bits."""
    ctx = CipherContext.from_pattern(_read_key(args.key), build_constellation(args.m))
    bits = decrypt(ctx, read_jones_csv(getattr(args, "in")))
    text = "".join(str(int(b)) for b in bits)
    if args.out:
        try:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        except OSError as e:
            raise ResultWriteError(f"Failed to write bits to {args.out}: {e}") from e
    else:
        print(text)
    return 0


def register(subparsers) -> None:
    p = subparsers.add_parser("keygen", help="draw a secret pattern")
    p.add_argument("--scheme", choices=["golden", "rotation", "opposite"], default="golden")
    p.add_argument("--seed", type=int, help="seed (fresh OS entropy when omitted)")
    p.add_argument("--theta", type=float, help="fixed rotation angle in radians")
    p.add_argument("--secure-band", action="store_true", help="draw theta from [pi/2, 3pi/2]")
    p.add_argument("--out", help="key file (stdout when omitted)")
    p.set_defaults(handler=keygen)

    p = subparsers.add_parser("transmit", help="encrypt bits into Jones vectors")
    p.add_argument("--key", required=True, help="key file")
    p.add_argument("--m", type=int, default=Config.DEFAULT_M, help="constellation size")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--bits", help="bit string, e.g. 010110")
    group.add_argument("--bits-file", help="file holding the bit string")
    p.add_argument("--out", required=True, help="Jones CSV output")
    p.set_defaults(handler=transmit)

    p = subparsers.add_parser("receive", help="decrypt Jones vectors into bits")
    p.add_argument("--key", required=True, help="key file")
    p.add_argument("--m", type=int, default=Config.DEFAULT_M, help="constellation size")
    p.add_argument("--in", required=True, help="Jones CSV input")
    p.add_argument("--out", help="bits output (stdout when omitted)")
    p.set_defaults(handler=receive)
