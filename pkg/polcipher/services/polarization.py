"""
Jones and Stokes representations of polarization states.

Conventions (baseband, carrier dropped):
    S0 = |ex|^2 + |ey|^2
    S1 = |ex|^2 - |ey|^2
    S2 = 2 Re(ex ey*)
    S3 = -2 Im(ex ey*)

Every function accepts a leading batch shape.
"""
import math
from dataclasses import dataclass

import numpy as np

from polcipher.config import Config
from polcipher.utils.arrays import as_finite
from polcipher.utils.exceptions import InvalidArgumentError, PolarizationDomainError


@dataclass(frozen=True)
class SphericalCoords:
    """Energy, elevation and azimuth of a fully polarized state."""

    energy: float
    elevation: float
    azimuth: float

    def __post_init__(self):
        for label, value in (("energy", self.energy), ("elevation", self.elevation),
                             ("azimuth", self.azimuth)):
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{label} must be finite, got {value}")
        if self.energy < 0:
            raise InvalidArgumentError(f"energy must be >= 0, got {self.energy}")
        if not 0.0 <= self.elevation < math.pi:
            raise InvalidArgumentError(f"elevation must lie in [0, pi), got {self.elevation}")
        if not 0.0 <= self.azimuth < 2 * math.pi:
            raise InvalidArgumentError(f"azimuth must lie in [0, 2pi), got {self.azimuth}")


def jones_to_stokes(e) -> np.ndarray:
    """
    Stokes vector of a Jones vector.

    Args:
        e: Complex array of shape (..., 2)

    Returns:
        Real array of shape (..., 4)

    Raises:
        InvalidArgumentError: If the input is malformed or non-finite
    """
    e = as_finite(e, complex, (2,), "Jones vector")
    ex, ey = e[..., 0], e[..., 1]
    px = (ex * ex.conj()).real
    py = (ey * ey.conj()).real
    cross = ex * ey.conj()
    return np.stack([px + py, px - py, 2.0 * cross.real, -2.0 * cross.imag], axis=-1)


def _reduced_norm(s: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(s[..., 1:] ** 2, axis=-1))


def stokes_to_jones(s, tol: float = None) -> np.ndarray:
    """
    Jones vector reproducing a fully polarized Stokes vector.

    The global phase is fixed by splitting the relative phase
    theta = atan2(s3, s2) symmetrically between the two components.

    Args:
        s: Real array of shape (..., 4)
        tol: Relative tolerance on the polarization equality

    Returns:
        Complex array of shape (..., 2)

    Raises:
        InvalidArgumentError: If s0 <= 0 or the input is non-finite
        PolarizationDomainError: If the state is not fully polarized
    """
    tol = Config.POLARIZATION_TOL if tol is None else tol
    s = as_finite(s, float, (4,), "Stokes vector")
    s0 = s[..., 0]
    if np.any(s0 <= 0):
        raise InvalidArgumentError("Stokes vector needs s0 > 0")

    mismatch = np.abs(_reduced_norm(s) - s0)
    if np.any(mismatch > tol * s0):
        worst = float(np.max(mismatch / s0))
        raise PolarizationDomainError(
            f"Stokes vector is not fully polarized (relative mismatch {worst:.3e})"
        )

    s1, s2, s3 = s[..., 1], s[..., 2], s[..., 3]
    theta = np.arctan2(s3, s2)
    amp_x = np.sqrt(np.clip((s0 + s1) / 2.0, 0.0, None))
    amp_y = np.sqrt(np.clip((s0 - s1) / 2.0, 0.0, None))
    return np.stack([amp_x * np.exp(-0.5j * theta), amp_y * np.exp(0.5j * theta)], axis=-1)


def spherical_to_jones(c: SphericalCoords) -> np.ndarray:
    """Jones vector of a point given in spherical coordinates."""
    root = math.sqrt(c.energy)
    return np.array([
        root * math.cos(c.elevation / 2) * np.exp(-0.5j * c.azimuth),
        root * math.sin(c.elevation / 2) * np.exp(0.5j * c.azimuth),
    ])


def degree_of_polarization(s, tol: float = None):
    """
    Ratio of polarized to total energy.

    Args:
        s: Real array of shape (..., 4)
        tol: Absolute slack around the [0, 1] boundary

    Returns:
        Float (or array for batched input) in [0, 1]

    Raises:
        InvalidArgumentError: If s0 <= 0
        PolarizationDomainError: If the ratio exceeds 1 beyond tolerance
    """
    tol = Config.ALGEBRAIC_TOL if tol is None else tol
    s = as_finite(s, float, (4,), "Stokes vector")
    s0 = s[..., 0]
    if np.any(s0 <= 0):
        raise InvalidArgumentError("degree of polarization needs s0 > 0")

    ratio = _reduced_norm(s) / s0
    if np.any(ratio > 1.0 + tol):
        raise PolarizationDomainError(
            f"Stokes vector violates the polarization inequality (ratio {float(np.max(ratio))})"
        )
    ratio = np.clip(ratio, 0.0, 1.0)
    return float(ratio) if ratio.ndim == 0 else ratio
