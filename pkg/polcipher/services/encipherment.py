"""
Secret patterns, their Mueller matrices and the obfuscation pipeline.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from polcipher.config import Config
from polcipher.services.constellation import SphereConstellation, demap, map_bits
from polcipher.services.mueller import PAULI, check_physical, mueller_from_coherency
from polcipher.services.polarization import jones_to_stokes, stokes_to_jones
from polcipher.utils.arrays import as_finite
from polcipher.utils.exceptions import CipherIntegrityError, InvalidArgumentError
from polcipher.utils.logger import setup_logger

logger = setup_logger("encipherment")

TWO_PI = 2.0 * math.pi

# Diagonal sign triples (M11, M22, M33) that give golden matrices
OPPOSITE_SIGNS = ((1, -1, -1), (-1, 1, -1), (-1, -1, 1))


class Scheme(str, Enum):
    """Encipherment scheme families."""

    GOLDEN = "golden"
    ROTATION = "rotation"
    OPPOSITE = "opposite"
    NONE = "none"


@dataclass(frozen=True)
class GoldenPattern:
    """Phase k0 and Pauli direction (k1, k2, k3)."""

    k0: float
    k1: float
    k2: float
    k3: float

    scheme = Scheme.GOLDEN

    def __post_init__(self):
        values = (self.k0, self.k1, self.k2, self.k3)
        if not all(math.isfinite(v) for v in values):
            raise InvalidArgumentError(f"golden pattern must be finite, got {values}")
        if self.k1 == 0 and self.k2 == 0 and self.k3 == 0:
            raise InvalidArgumentError("golden pattern direction (k1, k2, k3) must be nonzero")

    @property
    def params(self):
        return (self.k0, self.k1, self.k2, self.k3)


@dataclass(frozen=True)
class RotationPattern:
    """Axis angles (alpha, beta) and rotation angle theta on the Poincare sphere."""

    alpha: float
    beta: float
    theta: float

    scheme = Scheme.ROTATION

    def __post_init__(self):
        if not 0.0 <= self.alpha < math.pi:
            raise InvalidArgumentError(f"alpha must lie in [0, pi), got {self.alpha}")
        if not 0.0 <= self.beta < TWO_PI:
            raise InvalidArgumentError(f"beta must lie in [0, 2pi), got {self.beta}")
        if not 0.0 <= self.theta < TWO_PI:
            raise InvalidArgumentError(f"theta must lie in [0, 2pi), got {self.theta}")

    @property
    def axis(self) -> np.ndarray:
        return np.array([
            math.sin(self.alpha) * math.cos(self.beta),
            math.sin(self.alpha) * math.sin(self.beta),
            math.cos(self.alpha),
        ])

    @property
    def params(self):
        return (self.alpha, self.beta, self.theta)


@dataclass(frozen=True)
class OppositePattern:
    """Index into OPPOSITE_SIGNS."""

    variant: int

    scheme = Scheme.OPPOSITE

    def __post_init__(self):
        if isinstance(self.variant, bool) or self.variant not in (0, 1, 2):
            raise InvalidArgumentError(f"opposite variant must be 0, 1 or 2, got {self.variant}")

    @property
    def params(self):
        return (self.variant,)


@dataclass(frozen=True)
class PlainPattern:
    """No obfuscation; the unencrypted baseline."""

    scheme = Scheme.NONE

    @property
    def params(self):
        return ()


SecretPattern = Union[GoldenPattern, RotationPattern, OppositePattern, PlainPattern]


def golden_mueller(k: GoldenPattern) -> np.ndarray:
    """
    Golden Mueller matrix from the rank-one coherency c c^H.

    Args:
        k: Golden pattern

    Returns:
        Real 4x4 matrix with unit M00 and zero trace
    """
    c = np.array([0.0, k.k1, k.k2, k.k3], dtype=complex) * np.exp(1j * k.k0)
    c /= np.linalg.norm(c)
    return mueller_from_coherency(np.outer(c, c.conj()))


def golden_jones(k: GoldenPattern) -> np.ndarray:
    """Jones matrix (k1 s1 + k2 s2 + k3 s3) / |k| with the Pauli matrices above."""
    direction = np.array([k.k1, k.k2, k.k3], dtype=float)
    direction /= np.linalg.norm(direction)
    return np.einsum("n,nij->ij", direction, PAULI[1:])


def rodrigues_rotation(axis, theta: float) -> np.ndarray:
    """
    Rotation by theta about an axis.

    Args:
        axis: 3-vector, normalized internally
        theta: Angle in radians, any sign

    Returns:
        3x3 rotation matrix I + sin(theta) N + (1 - cos(theta)) N^2
    """
    n = as_finite(axis, float, (3,), "rotation axis")
    norm = np.linalg.norm(n)
    if norm == 0:
        raise InvalidArgumentError("rotation axis must be nonzero")
    n = n / norm
    cross = np.array([
        [0.0, -n[2], n[1]],
        [n[2], 0.0, -n[0]],
        [-n[1], n[0], 0.0],
    ])
    return np.eye(3) + math.sin(theta) * cross + (1.0 - math.cos(theta)) * (cross @ cross)


def _block(r: np.ndarray) -> np.ndarray:
    m = np.eye(4)
    m[1:, 1:] = r
    return m


def rotation_mueller(p: RotationPattern) -> np.ndarray:
    """Block-diag(1, R) for the pattern's Rodrigues rotation."""
    return _block(rodrigues_rotation(p.axis, p.theta))


def opposite_mueller(v: OppositePattern) -> np.ndarray:
    """Diagonal golden matrix of the chosen sign triple."""
    if not isinstance(v, OppositePattern):
        raise InvalidArgumentError(f"expected an OppositePattern, got {type(v).__name__}")
    return np.diag([1.0, *OPPOSITE_SIGNS[v.variant]]).astype(float)


def pattern_mueller(pattern: SecretPattern) -> np.ndarray:
    """Mueller matrix of any secret pattern."""
    if isinstance(pattern, GoldenPattern):
        return golden_mueller(pattern)
    if isinstance(pattern, RotationPattern):
        return rotation_mueller(pattern)
    if isinstance(pattern, OppositePattern):
        return opposite_mueller(pattern)
    if isinstance(pattern, PlainPattern):
        return np.eye(4)
    raise InvalidArgumentError(f"unknown pattern type {type(pattern).__name__}")


def pattern_mueller_inverse(pattern: SecretPattern) -> np.ndarray:
    """Inverse Mueller matrix; rotations are undone by rotating through -theta."""
    if isinstance(pattern, RotationPattern):
        return _block(rodrigues_rotation(pattern.axis, -pattern.theta))
    return np.linalg.inv(pattern_mueller(pattern))


@dataclass(frozen=True, eq=False)
class CipherContext:
    """Secret pattern with its forward and inverse Mueller matrices."""

    pattern: SecretPattern
    mueller: np.ndarray
    mueller_inverse: np.ndarray
    constellation: SphereConstellation

    @classmethod
    def from_pattern(cls, pattern: SecretPattern, constellation: SphereConstellation,
                     tol: float = None) -> "CipherContext":
        """
        Build and verify a context.

        Raises:
            CipherIntegrityError: If the matrix is not physical or the inverse is inexact
        """
        tol = Config.ALGEBRAIC_TOL if tol is None else tol
        mueller = pattern_mueller(pattern)
        report = check_physical(mueller)
        if not report.physical:
            raise CipherIntegrityError(
                f"{pattern.scheme.value} pattern gives a non-physical Mueller matrix: {report}"
            )
        inverse = pattern_mueller_inverse(pattern)
        if np.max(np.abs(mueller @ inverse - np.eye(4))) > tol:
            raise CipherIntegrityError(f"inverse of {pattern.scheme.value} pattern is inexact")
        mueller.setflags(write=False)
        inverse.setflags(write=False)
        return cls(pattern=pattern, mueller=mueller, mueller_inverse=inverse,
                   constellation=constellation)


def _check_block(bits, k: int) -> np.ndarray:
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size == 0 or bits.size % k:
        raise InvalidArgumentError(
            f"bit block length must be a positive multiple of {k}, got {bits.shape}"
        )
    return bits.reshape(-1, k)


def encrypt(ctx: CipherContext, bits) -> np.ndarray:
    """
    Map, obfuscate and synthesize the cipherfield of one bit block.

    Args:
        ctx: Cipher context
        bits: 1-D array of 0/1 with length divisible by log2 M

    Returns:
        Complex (N, 2) array of Jones vectors, one per symbol

    Raises:
        InvalidArgumentError: If the block length is wrong
        CipherIntegrityError: If an obfuscated symbol is not fully polarized
    """
    plain = map_bits(ctx.constellation, _check_block(bits, ctx.constellation.bits_per_symbol))
    cipher = plain @ ctx.mueller.T
    s0 = cipher[:, 0]
    reduced = np.linalg.norm(cipher[:, 1:], axis=1)
    if np.any(s0 <= 0) or np.any(np.abs(reduced - s0) > Config.POLARIZATION_TOL * s0):
        raise CipherIntegrityError("obfuscated symbols are not fully polarized")
    return stokes_to_jones(cipher)


def decrypt(ctx: CipherContext, received, channel=None, *, as_eavesdropper: bool = False) -> np.ndarray:
    """
    Equalize, undo the obfuscation and demap.

    Args:
        ctx: Cipher context (the eavesdropper only uses its constellation)
        received: Complex (N, 2) Jones vectors
        channel: Known 2x2 channel matrix, identity by default
        as_eavesdropper: Skip the inverse Mueller matrix

    Returns:
        1-D array of recovered bits

    Raises:
        InvalidArgumentError: If the channel is singular
    """
    y = as_finite(received, complex, (2,), "received field").reshape(-1, 2)
    if channel is not None:
        h = as_finite(channel, complex, (2, 2), "channel")
        if abs(np.linalg.det(h)) <= Config.ALGEBRAIC_TOL:
            raise InvalidArgumentError("channel matrix is singular")
        y = np.linalg.solve(h, y.T).T

    stokes = jones_to_stokes(y)
    if not as_eavesdropper:
        stokes = stokes @ ctx.mueller_inverse.T
    return demap(ctx.constellation, stokes).reshape(-1)


def random_pattern(scheme, rng: np.random.Generator, theta: Optional[float] = None,
                   secure_band: bool = False) -> SecretPattern:
    """
    Draw a fresh secret pattern.

    Args:
        scheme: Scheme or its name
        rng: Random generator
        theta: Fixed rotation angle (rotation only)
        secure_band: Draw theta from [pi/2, 3pi/2] (rotation only)

    Returns:
        A pattern of the requested family
    """
    try:
        scheme = Scheme(scheme)
    except ValueError as e:
        raise InvalidArgumentError(f"unknown scheme {scheme!r}") from e
    if scheme is Scheme.GOLDEN:
        k0 = rng.uniform(0.0, TWO_PI)
        k = rng.standard_normal(3)
        while not np.any(k):
            k = rng.standard_normal(3)
        return GoldenPattern(float(k0), *(float(v) for v in k))
    if scheme is Scheme.ROTATION:
        alpha = float(rng.uniform(0.0, math.pi))
        beta = float(rng.uniform(0.0, TWO_PI))
        if theta is not None:
            angle = float(theta) % TWO_PI
            # tiny negative angles round up to exactly 2pi
            if angle >= TWO_PI:
                angle = 0.0
        elif secure_band:
            angle = float(rng.uniform(math.pi / 2, 3 * math.pi / 2))
        else:
            angle = float(rng.uniform(0.0, TWO_PI))
        return RotationPattern(alpha, beta, angle)
    if scheme is Scheme.OPPOSITE:
        return OppositePattern(int(rng.integers(0, 3)))
    return PlainPattern()


def pattern_to_record(pattern: SecretPattern) -> str:
    """Single-line ``scheme;p1;p2;...`` record with 17 significant digits."""
    fields = [pattern.scheme.value]
    for value in pattern.params:
        fields.append(str(value) if isinstance(value, int) else f"{value:.17g}")
    return ";".join(fields)


def pattern_from_record(record: str) -> SecretPattern:
    """
    Parse a record written by ``pattern_to_record``.

    Raises:
        InvalidArgumentError: If the record is malformed
    """
    fields = [f.strip() for f in record.strip().split(";")]
    try:
        scheme = Scheme(fields[0])
        values = fields[1:]
        if scheme is Scheme.GOLDEN and len(values) == 4:
            return GoldenPattern(*(float(v) for v in values))
        if scheme is Scheme.ROTATION and len(values) == 3:
            return RotationPattern(*(float(v) for v in values))
        if scheme is Scheme.OPPOSITE and len(values) == 1:
            return OppositePattern(int(values[0]))
        if scheme is Scheme.NONE and not values:
            return PlainPattern()
    except ValueError as e:
        raise InvalidArgumentError(f"malformed pattern record {record!r}: {e}") from e
    raise InvalidArgumentError(f"malformed pattern record {record!r}")
