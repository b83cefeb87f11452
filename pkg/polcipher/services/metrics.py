"""
Strength metrics: amount of transformation, its bounds and the average transformation.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from polcipher.config import Config
from polcipher.services.constellation import SphereConstellation
from polcipher.utils.arrays import as_finite
from polcipher.utils.exceptions import InvalidArgumentError, InternalConsistencyError
from polcipher.utils.logger import setup_logger
from polcipher.utils.rng import stream

logger = setup_logger("metrics")

FOUR_PI = 4.0 * math.pi
MIN_MC_SAMPLES = 1000


def _displacement(m) -> np.ndarray:
    """D = (M - I)^T (M - I)."""
    diff = as_finite(m, float, (4, 4), "Mueller matrix") - np.eye(4)
    return np.swapaxes(diff, -1, -2) @ diff


def amount_of_transformation(m):
    """
    Exact surface integral of |(M - I) S|^2 over the unit Poincare sphere.

    Args:
        m: Real 4x4 matrix (or a batch)

    Returns:
        4 pi (D00 + (D11 + D22 + D33) / 3)
    """
    d = _displacement(m)
    value = FOUR_PI * (d[..., 0, 0] + (d[..., 1, 1] + d[..., 2, 2] + d[..., 3, 3]) / 3.0)
    return float(value) if np.ndim(value) == 0 else value


def uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    """n uniform unit 3-vectors (normalized Gaussian directions)."""
    g = rng.standard_normal((n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def amount_of_transformation_mc(m, n: int, seed: int, shard_size: int = None) -> Tuple[float, float]:
    """
    Monte-Carlo estimate of the amount of transformation.

    Samples are drawn in fixed-size shards, shard i from stream (seed, i),
    so the estimate does not depend on how shards are scheduled.

    Args:
        m: Real 4x4 matrix
        n: Number of sphere samples (>= 1000)
        seed: Master seed
        shard_size: Samples per shard

    Returns:
        (estimate, standard error)

    Raises:
        InvalidArgumentError: If n is too small
    """
    if n < MIN_MC_SAMPLES:
        raise InvalidArgumentError(f"need at least {MIN_MC_SAMPLES} samples, got {n}")
    shard_size = Config.SHARD_SIZE if shard_size is None else shard_size
    diff = as_finite(m, float, (4, 4), "Mueller matrix") - np.eye(4)

    total, total_sq = 0.0, 0.0
    for shard, start in enumerate(range(0, n, shard_size)):
        count = min(shard_size, n - start)
        s = np.hstack([np.ones((count, 1)), uniform_sphere(stream(seed, shard), count)])
        values = np.sum((s @ diff.T) ** 2, axis=1)
        total += float(values.sum())
        total_sq += float(np.sum(values ** 2))

    mean = total / n
    variance = max(0.0, total_sq / n - mean ** 2)
    return FOUR_PI * mean, FOUR_PI * math.sqrt(variance / (n - 1))


def q_bounds(m) -> Tuple[float, float]:
    """Lower and upper bounds (4pi/3 |M-I|_F^2, 8pi |M-I|_F^2)."""
    diff = as_finite(m, float, (4, 4), "Mueller matrix") - np.eye(4)
    norm2 = float(np.sum(diff ** 2))
    return FOUR_PI / 3.0 * norm2, 8.0 * math.pi * norm2


def _probabilities(size: int, probs) -> np.ndarray:
    if probs is None:
        return np.full(size, 1.0 / size)
    p = as_finite(probs, float, (size,), "probabilities")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise InvalidArgumentError("probabilities must be non-negative and sum to 1")
    return p


def autocorrelation(c: SphereConstellation, probs=None) -> np.ndarray:
    """Symbol autocorrelation sum_n P(S_n) S_n S_n^T (4x4)."""
    s = c.symbols
    return np.einsum("n,ni,nj->ij", _probabilities(c.size, probs), s, s)


def average_transformation(m, c: SphereConstellation, probs=None) -> float:
    """
    Probability-weighted squared displacement of the constellation symbols.

    Args:
        m: Real 4x4 matrix
        c: Constellation
        probs: Symbol distribution, equiprobable by default

    Returns:
        sum_n S_n^T D S_n P(S_n)

    Raises:
        InvalidArgumentError: If the distribution is invalid
    """
    p = _probabilities(c.size, probs)
    s = c.symbols
    values = np.einsum("ni,ij,nj->n", s, _displacement(m), s)
    return float(np.dot(p, values))


def rotation_q_curve(thetas) -> np.ndarray:
    """Amount of transformation of a sphere rotation by each theta: 16pi/3 (1 - cos theta)."""
    thetas = as_finite(np.atleast_1d(thetas), float, (), "theta")
    return 16.0 * math.pi / 3.0 * (1.0 - np.cos(thetas))


@dataclass(frozen=True)
class TransformationReport:
    """All strength figures of one Mueller matrix."""

    q_closed: float
    q_lower: float
    q_upper: float
    q_mc: Optional[float] = None
    q_mc_se: Optional[float] = None
    p_avg: Optional[float] = None

    def __post_init__(self):
        slack = 1e-9 * max(1.0, self.q_upper)
        if not (self.q_lower - slack <= self.q_closed <= self.q_upper + slack):
            raise InternalConsistencyError(
                f"Q={self.q_closed} outside bounds [{self.q_lower}, {self.q_upper}]"
            )


def transformation_report(m, constellation: SphereConstellation = None,
                          mc_samples: int = None, seed: int = 0) -> TransformationReport:
    """
    Closed form, bounds and optional Monte-Carlo and constellation figures.

    Args:
        m: Real 4x4 matrix
        constellation: If given, the average transformation is included
        mc_samples: If given, the Monte-Carlo estimate is included
        seed: Seed for the Monte-Carlo estimate

    Returns:
        TransformationReport
    """
    lower, upper = q_bounds(m)
    q_mc = q_mc_se = p_avg = None
    if mc_samples:
        q_mc, q_mc_se = amount_of_transformation_mc(m, mc_samples, seed)
    if constellation is not None:
        p_avg = average_transformation(m, constellation)
    report = TransformationReport(
        q_closed=amount_of_transformation(m),
        q_lower=lower,
        q_upper=upper,
        q_mc=q_mc,
        q_mc_se=q_mc_se,
        p_avg=p_avg,
    )
    logger.debug(f"Transformation report: {report}")
    return report
