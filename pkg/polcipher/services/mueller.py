"""
Mueller and coherency calculus with physical-realizability checks.
"""
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from polcipher.config import Config
from polcipher.utils.arrays import as_finite
from polcipher.utils.exceptions import InvalidArgumentError, InternalConsistencyError

# Maps E (x) E* onto the Stokes vector
A = np.array([
    [1, 0, 0, 1],
    [1, 0, 0, -1],
    [0, 1, 1, 0],
    [0, 1j, -1j, 0],
], dtype=complex)
A_INV = 0.5 * A.conj().T

# sigma_0..sigma_3 ordered to match S0..S3
PAULI = np.array([
    [[1, 0], [0, 1]],
    [[1, 0], [0, -1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
], dtype=complex)


def _kron_conj(j: np.ndarray) -> np.ndarray:
    """Batched J (x) conj(J)."""
    k = np.einsum("...ik,...jl->...ijkl", j, j.conj())
    return k.reshape(j.shape[:-2] + (4, 4))


def gamma(n: int, m: int) -> np.ndarray:
    """
    Coherency basis matrix A (sigma_n (x) sigma_m*) A^-1.

    Args:
        n: Row index in 0..3
        m: Column index in 0..3

    Returns:
        Complex 4x4 Hermitian matrix

    Raises:
        InvalidArgumentError: If an index is out of range
    """
    if not (0 <= n <= 3 and 0 <= m <= 3):
        raise InvalidArgumentError(f"gamma indices must lie in 0..3, got ({n}, {m})")
    return _gamma_basis()[n, m].copy()


@lru_cache(maxsize=1)
def _gamma_basis() -> np.ndarray:
    basis = np.empty((4, 4, 4, 4), dtype=complex)
    for n in range(4):
        for m in range(4):
            basis[n, m] = A @ np.kron(PAULI[n], PAULI[m].conj()) @ A_INV
    basis.setflags(write=False)
    return basis


def jones_to_mueller(j) -> np.ndarray:
    """
    Mueller matrix equivalent to a Jones matrix.

    Args:
        j: Complex array of shape (..., 2, 2)

    Returns:
        Real array of shape (..., 4, 4)

    Raises:
        InvalidArgumentError: If the input is malformed or non-finite
        InternalConsistencyError: If the product leaves an imaginary residue
    """
    j = as_finite(j, complex, (2, 2), "Jones matrix")
    m = A @ _kron_conj(j) @ A_INV
    scale = max(1.0, float(np.max(np.abs(m.real), initial=0.0)))
    residue = float(np.max(np.abs(m.imag), initial=0.0))
    if residue > Config.ALGEBRAIC_TOL * scale:
        raise InternalConsistencyError(
            f"Mueller matrix has imaginary residue {residue:.3e}"
        )
    return np.ascontiguousarray(m.real)


def coherency_from_mueller(m) -> np.ndarray:
    """Hermitian coherency matrix C = 1/4 sum M_nm Gamma_nm."""
    m = as_finite(m, float, (4, 4), "Mueller matrix")
    return 0.25 * np.einsum("...nm,nmij->...ij", m, _gamma_basis())


def mueller_from_coherency(c, tol: float = None) -> np.ndarray:
    """
    Mueller matrix M_nm = tr(Gamma_nm C).

    Args:
        c: Complex array of shape (..., 4, 4)
        tol: Hermiticity tolerance, scaled by the largest entry

    Returns:
        Real array of shape (..., 4, 4)

    Raises:
        InvalidArgumentError: If C is not Hermitian
    """
    tol = Config.HERMITIAN_TOL if tol is None else tol
    c = as_finite(c, complex, (4, 4), "coherency matrix")
    scale = max(1.0, float(np.max(np.abs(c), initial=0.0)))
    skew = float(np.max(np.abs(c - np.swapaxes(c.conj(), -1, -2)), initial=0.0))
    if skew > tol * scale:
        raise InvalidArgumentError(f"coherency matrix is not Hermitian (skew {skew:.3e})")
    return np.einsum("nmij,...ji->...nm", _gamma_basis(), c).real


@dataclass(frozen=True)
class PhysicalityReport:
    """Outcome of every realizability condition for one Mueller matrix."""

    eigenvalues: Tuple[float, float, float, float]
    g_f: float
    g_r: float
    eigenvalue_ok: bool
    transmittance_ok: bool
    invertible: bool
    pure: bool
    golden: bool

    def __post_init__(self):
        if self.pure and not self.eigenvalue_ok:
            raise InternalConsistencyError("pure report without eigenvalue condition")
        if self.golden and not self.pure:
            raise InternalConsistencyError("golden report without purity")

    @property
    def physical(self) -> bool:
        """Usable as a cipher: realizable, passive and invertible."""
        return self.eigenvalue_ok and self.transmittance_ok and self.invertible


def check_physical(m, tol: float = None) -> PhysicalityReport:
    """
    Evaluate the realizability conditions of a Mueller matrix.

    Args:
        m: Real 4x4 matrix
        tol: Absolute tolerance on eigenvalues, transmittance and purity

    Returns:
        PhysicalityReport with all outcomes
    """
    tol = Config.PHYSICAL_TOL if tol is None else tol
    m = as_finite(m, float, (4, 4), "Mueller matrix")
    if m.ndim != 2:
        raise InvalidArgumentError("check_physical expects a single 4x4 matrix")

    eig = np.linalg.eigvalsh(coherency_from_mueller(m))[::-1]
    g_f = float(m[0, 0] + np.linalg.norm(m[0, 1:]))
    g_r = float(m[0, 0] + np.linalg.norm(m[1:, 0]))

    eigenvalue_ok = bool(eig[3] >= -tol)
    transmittance_ok = g_f <= 1.0 + tol and g_r <= 1.0 + tol
    invertible = bool(abs(np.linalg.det(m)) > tol)
    purity_gap = abs(0.25 * np.trace(m.T @ m) - m[0, 0] ** 2)
    pure = (
        eigenvalue_ok
        and purity_gap <= tol * max(1.0, m[0, 0] ** 2)
        and int(np.sum(eig > tol)) == 1
    )
    golden = pure and abs(eig[0] - 1.0) <= tol

    return PhysicalityReport(
        eigenvalues=tuple(float(v) for v in eig),
        g_f=g_f,
        g_r=g_r,
        eigenvalue_ok=eigenvalue_ok,
        transmittance_ok=transmittance_ok,
        invertible=invertible,
        pure=bool(pure),
        golden=bool(golden),
    )


def lemma2_residuals(m) -> np.ndarray:
    """
    Residuals |det M - e^2| of the row and column determinant identities.

    Row i uses e = M_i0^2 - sum_{j>=1} M_ij^2, column j uses
    e = M_0j^2 - sum_{i>=1} M_ij^2. Rows come first.

    Args:
        m: Real 4x4 matrix

    Returns:
        Array of 8 non-negative residuals
    """
    m = as_finite(m, float, (4, 4), "Mueller matrix")
    det = np.linalg.det(m)
    sq = m ** 2
    rows = sq[..., :, 0] - np.sum(sq[..., :, 1:], axis=-1)
    cols = sq[..., 0, :] - np.sum(sq[..., 1:, :], axis=-2)
    expressions = np.concatenate([rows, cols], axis=-1)
    return np.abs(det[..., None] - expressions ** 2)


def power_invariants(m, powers: int = 3) -> Tuple[np.ndarray, np.ndarray]:
    """Traces and determinants of M^k for k = 1..powers."""
    m = as_finite(m, float, (4, 4), "Mueller matrix")
    traces, dets = [], []
    current = m
    for _ in range(powers):
        traces.append(np.trace(current, axis1=-2, axis2=-1))
        dets.append(np.linalg.det(current))
        current = current @ m
    return np.stack(traces, axis=-1), np.stack(dets, axis=-1)


def random_jones(rng: np.random.Generator, size: int = None) -> np.ndarray:
    """
    Draw passive Jones matrices (largest singular value scaled to U(0, 1]).

    Args:
        rng: Random generator
        size: Batch size, or None for a single matrix

    Returns:
        Complex array of shape (size, 2, 2) or (2, 2)
    """
    shape = (1 if size is None else size, 2, 2)
    g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    sigma_max = np.linalg.norm(g, ord=2, axis=(-2, -1))
    gain = np.sqrt(1.0 - rng.random(shape[0]))
    j = g * (gain / sigma_max)[:, None, None]
    return j[0] if size is None else j
