"""
Poincare-sphere constellations: point sets, bit mapping and demapping.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import pdist

from polcipher.config import Config
from polcipher.utils.arrays import as_finite
from polcipher.utils.exceptions import InvalidArgumentError, ResultWriteError
from polcipher.utils.logger import setup_logger
from polcipher.utils.rng import stream

logger = setup_logger("constellation")

SUPPORTED_SIZES = (2, 4, 8, 16, 32)
UNIT_TOL = 1e-12


def min_pairwise_angle(points: np.ndarray) -> float:
    """Smallest great-circle angle between two points of a unit set."""
    chord = float(pdist(points).min())
    return 2.0 * math.asin(min(1.0, chord / 2.0))


@dataclass(frozen=True, eq=False)
class SphereConstellation:
    """
    Immutable symbol set on the unit sphere.

    Attributes:
        size: Number of symbols M
        points: (M, 3) unit reduced Stokes vectors
        bit_map: bit_map[label] is the index of the point carrying that label
        min_angle: Smallest pairwise angle in radians
    """

    size: int
    points: np.ndarray
    bit_map: Tuple[int, ...]
    min_angle: float

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.shape != (self.size, 3):
            raise InvalidArgumentError(
                f"expected {self.size} points of dimension 3, got {points.shape}"
            )
        if np.any(np.abs(np.linalg.norm(points, axis=1) - 1.0) > UNIT_TOL):
            raise InvalidArgumentError("constellation points must have unit norm")
        if sorted(self.bit_map) != list(range(self.size)):
            raise InvalidArgumentError("bit_map must be a permutation of the point indices")
        angle = min_pairwise_angle(points)
        if angle <= 0 or abs(angle - self.min_angle) > 1e-9:
            raise InvalidArgumentError(
                f"recorded min angle {self.min_angle} does not match point set ({angle})"
            )
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

        label_of = np.empty(self.size, dtype=np.int64)
        label_of[list(self.bit_map)] = np.arange(self.size)
        label_of.setflags(write=False)
        object.__setattr__(self, "_label_of_point", label_of)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.size))

    @property
    def label_of_point(self) -> np.ndarray:
        return self._label_of_point

    @property
    def symbols(self) -> np.ndarray:
        """(M, 4) Stokes vectors with S0 = 1, in point order."""
        return np.hstack([np.ones((self.size, 1)), self.points])


def _tetrahedron() -> np.ndarray:
    r = 2.0 * math.sqrt(2.0) / 3.0
    azimuths = np.array([0.0, 2.0, 4.0]) * math.pi / 3.0
    lower = np.column_stack([r * np.cos(azimuths), r * np.sin(azimuths), np.full(3, -1.0 / 3.0)])
    return np.vstack([[0.0, 0.0, 1.0], lower])


def _square_antiprism() -> np.ndarray:
    # height where square edges and zig-zag edges have equal length
    h = math.sqrt(math.sqrt(2.0) / (4.0 + math.sqrt(2.0)))
    r = math.sqrt(1.0 - h * h)
    top = np.arange(4) * math.pi / 2.0
    bottom = top + math.pi / 4.0
    upper = np.column_stack([r * np.cos(top), r * np.sin(top), np.full(4, h)])
    lower = np.column_stack([r * np.cos(bottom), r * np.sin(bottom), np.full(4, -h)])
    return np.vstack([upper, lower])


def golden_spiral(n: int) -> np.ndarray:
    """Fibonacci lattice on the unit sphere."""
    k = np.arange(n)
    z = 1.0 - (2.0 * k + 1.0) / n
    r = np.sqrt(1.0 - z * z)
    phi = k * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _normalize(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def optimize_spherical_code(
    n: int,
    seed: int = None,
    iterations: int = None,
    exponents: Sequence[float] = None,
) -> np.ndarray:
    """
    Spread n points on the sphere by projected Riesz-energy descent.

    The exponent increases stage by stage so the late stages are dominated
    by nearest neighbours and approach a max-min-distance code. The best
    configuration seen (by minimum distance) is returned.

    Args:
        n: Number of points
        seed: Seed for the start jitter
        iterations: Steps per exponent stage
        exponents: Riesz exponents, in increasing order

    Returns:
        (n, 3) array of unit vectors
    """
    seed = Config.CONSTELLATION_SEED if seed is None else seed
    iterations = Config.CONSTELLATION_ITERATIONS if iterations is None else iterations
    exponents = Config.CONSTELLATION_EXPONENTS if exponents is None else tuple(exponents)
    if n < 2:
        raise InvalidArgumentError(f"need at least two points, got {n}")

    rng = stream(seed, n)
    x = _normalize(golden_spiral(n) + 1e-3 * rng.standard_normal((n, 3)))
    best, best_d = x.copy(), float(pdist(x).min())

    lr_start, lr_stop = 0.05, 1e-4
    decay = (lr_stop / lr_start) ** (1.0 / max(1, iterations))
    for s in exponents:
        lr = lr_start
        for _ in range(iterations):
            diff = x[:, None, :] - x[None, :, :]
            d2 = np.sum(diff ** 2, axis=-1)
            np.fill_diagonal(d2, np.inf)
            d2_min = d2.min()
            weights = (d2 / d2_min) ** (-(s + 2.0) / 2.0)
            force = np.sum(weights[..., None] * diff, axis=1)
            force -= np.sum(force * x, axis=1, keepdims=True) * x
            f_max = np.linalg.norm(force, axis=1).max()
            if f_max == 0:
                break
            x = _normalize(x + lr * math.sqrt(d2_min) * force / f_max)
            lr *= decay

            d_min = float(pdist(x).min())
            if d_min > best_d:
                best, best_d = x.copy(), d_min
        logger.debug(f"Riesz stage s={s} for n={n}: min distance {best_d:.6f}")

    return _normalize(best)


# Labels of the square antiprism, bit_map[label] = point index; a receiver
# that skips the inverse pattern errs on about half the bits at any SNR.
ANTIPRISM_BIT_MAP = (0, 1, 2, 7, 5, 6, 3, 4)


def hamming_table(k: int) -> np.ndarray:
    """(2^k, 2^k) Hamming distances between k-bit labels."""
    labels = np.arange(1 << k)
    return labels_to_bits(np.bitwise_xor.outer(labels, labels), k).sum(axis=-1)


def half_turn_confusion(points: np.ndarray, axes: int = 4096) -> np.ndarray:
    """
    Noiseless decision frequencies of a receiver that skips the inverse
    of a half-turn about uniformly spread axes.

    Returns:
        (M, M) row-stochastic matrix; entry (i, j) is the share of axes
        that move point i into the decision region of point j
    """
    points = np.asarray(points, dtype=float)
    n = golden_spiral(axes)
    proj = points @ n.T
    images = 2.0 * proj[..., None] * n[None] - points[:, None, :]
    decided = np.argmax(images @ points.T, axis=-1)
    m = len(points)
    counts = np.stack([np.bincount(row, minlength=m) for row in decided])
    return counts / float(axes)


def labelling_imbalance(confusion: np.ndarray, point_labels) -> float:
    """Sum over points of (expected bit errors - k/2)^2 under a confusion matrix."""
    point_labels = np.asarray(point_labels, dtype=np.int64)
    k = int(math.log2(len(point_labels)))
    h = hamming_table(k)[np.ix_(point_labels, point_labels)]
    expected = np.sum(confusion * h, axis=1)
    return float(np.sum((expected - k / 2.0) ** 2))


def balanced_bit_map(points: np.ndarray, axes: int = 4096) -> Tuple[int, ...]:
    """
    Labelling under which a wrong-key decision costs about half the bits.

    Starts from the identity labelling and swaps label pairs while the
    imbalance over the half-turn confusion matrix decreases.
    """
    confusion = half_turn_confusion(points, axes)
    labels = np.arange(len(points))
    cost = labelling_imbalance(confusion, labels)
    improved = True
    while improved:
        improved = False
        for a in range(len(labels)):
            for b in range(a + 1, len(labels)):
                labels[[a, b]] = labels[[b, a]]
                trial = labelling_imbalance(confusion, labels)
                if trial < cost - 1e-12:
                    cost, improved = trial, True
                else:
                    labels[[a, b]] = labels[[b, a]]
    logger.debug(f"Balanced labelling of {len(labels)} points, imbalance {cost:.6f}")
    return tuple(int(i) for i in np.argsort(labels))


def save_points(points, path, header: str = None) -> Path:
    """
    Write a point set, one point per line with 17 significant digits.

    Args:
        points: (n, 3) array
        path: Destination file
        header: Optional comment written as the first line

    Raises:
        ResultWriteError: If the file cannot be written
    """
    points = as_finite(points, float, (3,), "points")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            if header:
                f.write(f"# {header}\n")
            for p in points.reshape(-1, 3):
                f.write(" ".join(f"{v:.17g}" for v in p) + "\n")
    except OSError as e:
        raise ResultWriteError(f"Failed to write point set to {path}: {e}") from e
    logger.info(f"Wrote {len(points)} points to {path}")
    return path


def load_points(path) -> np.ndarray:
    """
    Read a point set written by ``save_points`` and renormalize it.

    Blank lines and lines starting with ``#`` are skipped.

    Raises:
        InvalidArgumentError: If the file is missing or malformed
    """
    path = Path(path)
    rows = []
    try:
        with open(path, "r", encoding="utf-8") as f:
            for number, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                fields = line.split()
                if len(fields) != 3:
                    raise InvalidArgumentError(f"{path}:{number}: expected 3 fields")
                rows.append([float(v) for v in fields])
    except OSError as e:
        raise InvalidArgumentError(f"Cannot read point set {path}: {e}") from e
    except ValueError as e:
        if isinstance(e, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"{path}: malformed number ({e})") from e
    if not rows:
        raise InvalidArgumentError(f"{path}: no points")
    return _normalize(as_finite(rows, float, (3,), "points"))


def constellation_path(m: int) -> Path:
    return Config.CONSTELLATION_DIR / f"sphere_{m}.txt"


def labelled_points(c: SphereConstellation) -> np.ndarray:
    """Points in label order: row k carries label k."""
    return c.points[list(c.bit_map)]


def _canonical(m: int) -> Tuple[np.ndarray, Optional[Tuple[int, ...]]]:
    """Point set and bit map of size m; a None map asks for a balanced one."""
    if m == 2:
        return np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]), (0, 1)
    if m == 4:
        return _tetrahedron(), (0, 1, 2, 3)
    if m == 8:
        return _square_antiprism(), ANTIPRISM_BIT_MAP

    # baked files list their points in label order
    path = constellation_path(m)
    if path.exists():
        points = load_points(path)
        if points.shape == (m, 3):
            logger.info(f"Loaded {m}-point constellation from {path}")
            return points, tuple(range(m))
        logger.warning(f"Ignoring {path}: holds {len(points)} points, expected {m}")
    else:
        logger.warning(f"{path} not found; optimizing the {m}-point set")
    return optimize_spherical_code(m), None


def constellation_from_points(points, bit_map: Sequence[int] = None) -> SphereConstellation:
    """
    Wrap a unit point set.

    Args:
        points: (M, 3) array, M a power of two
        bit_map: bit_map[label] = point index; balanced_bit_map when omitted

    Raises:
        InvalidArgumentError: If M is not a power of two or the map is not a permutation
    """
    points = _normalize(as_finite(points, float, (3,), "points"))
    m = len(points)
    if m < 2 or m & (m - 1):
        raise InvalidArgumentError(f"constellation size must be a power of two, got {m}")
    return SphereConstellation(
        size=m,
        points=points,
        bit_map=balanced_bit_map(points) if bit_map is None else tuple(int(i) for i in bit_map),
        min_angle=min_pairwise_angle(points),
    )


@lru_cache(maxsize=None)
def build_constellation(m: int) -> SphereConstellation:
    """
    Canonical constellation of size m.

    Args:
        m: One of 2, 4, 8, 16, 32

    Returns:
        SphereConstellation

    Raises:
        InvalidArgumentError: If the size is unsupported
    """
    if m not in SUPPORTED_SIZES:
        raise InvalidArgumentError(
            f"unsupported constellation size {m}; choose one of {SUPPORTED_SIZES}"
        )
    constellation = constellation_from_points(*_canonical(m))
    logger.info(
        f"Built {m}-point constellation, min angle {math.degrees(constellation.min_angle):.3f} deg"
    )
    return constellation


def bits_to_labels(bits, k: int) -> np.ndarray:
    """MSB-first labels of bit blocks shaped (..., k)."""
    bits = np.asarray(bits)
    if bits.shape[-1:] != (k,):
        raise InvalidArgumentError(f"bit block must have length {k}, got {bits.shape[-1:]}")
    if not np.all((bits == 0) | (bits == 1)):
        raise InvalidArgumentError("bits must be 0 or 1")
    weights = 1 << np.arange(k - 1, -1, -1)
    return np.sum(bits.astype(np.int64) * weights, axis=-1)


def labels_to_bits(labels, k: int) -> np.ndarray:
    """MSB-first bit blocks of integer labels."""
    labels = np.asarray(labels, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1)
    return ((labels[..., None] >> shifts) & 1).astype(np.int8)


def map_labels(c: SphereConstellation, labels) -> np.ndarray:
    """Stokes vectors (S0 = 1) of integer labels."""
    labels = np.asarray(labels, dtype=np.int64)
    if np.any((labels < 0) | (labels >= c.size)):
        raise InvalidArgumentError(f"labels must lie in 0..{c.size - 1}")
    return c.symbols[np.asarray(c.bit_map)[labels]]


def map_bits(c: SphereConstellation, bits) -> np.ndarray:
    """
    Map bit blocks onto the constellation.

    Args:
        c: Constellation
        bits: Array of shape (..., log2 M) holding 0/1

    Returns:
        Stokes vectors of shape (..., 4) with S0 = 1

    Raises:
        InvalidArgumentError: If the block length is wrong
    """
    return map_labels(c, bits_to_labels(bits, c.bits_per_symbol))


def demap_labels(c: SphereConstellation, s) -> np.ndarray:
    """Nearest-point labels of Stokes vectors; ties go to the lowest point index."""
    s = as_finite(s, float, (4,), "Stokes vector")
    s0 = s[..., 0]
    if np.any(s0 <= 0):
        raise InvalidArgumentError("demapping needs s0 > 0")
    u = s[..., 1:] / s0[..., None]
    d2 = np.sum((u[..., None, :] - c.points) ** 2, axis=-1)
    return c.label_of_point[np.argmin(d2, axis=-1)]


def demap(c: SphereConstellation, s) -> np.ndarray:
    """
    Minimum-distance decision on the unit sphere.

    Args:
        c: Constellation
        s: Stokes vectors of shape (..., 4)

    Returns:
        Bit blocks of shape (..., log2 M)

    Raises:
        InvalidArgumentError: If s0 <= 0
    """
    return labels_to_bits(demap_labels(c, s), c.bits_per_symbol)
