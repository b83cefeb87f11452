"""
AWGN channel, Stokes-detector statistics, polarization impairments and single trials.
"""
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from polcipher.config import Config
from polcipher.services.constellation import SphereConstellation, map_labels
from polcipher.services.encipherment import (
    CipherContext,
    Scheme,
    decrypt,
    encrypt,
    random_pattern,
)
from polcipher.services.mueller import jones_to_mueller
from polcipher.services.polarization import jones_to_stokes, stokes_to_jones
from polcipher.utils.arrays import as_finite
from polcipher.utils.exceptions import InternalConsistencyError, InvalidArgumentError
from polcipher.utils.logger import setup_logger
from polcipher.utils.rng import stream

logger = setup_logger("channel")

# Transmitted symbols carry S0 = 1, i.e. half the energy per polarization
P_X = 0.5


@dataclass(frozen=True)
class Impairment:
    """Imperfect polarization Jones matrix [[1, a], [b, c]]."""

    kind: str
    a: complex
    b: complex
    c: complex

    def __post_init__(self):
        for label in ("a", "b", "c"):
            value = complex(getattr(self, label))
            if not (math.isfinite(value.real) and math.isfinite(value.imag)):
                raise InvalidArgumentError(f"impairment {label} must be finite")
            if abs(value) > 1.0 + Config.ALGEBRAIC_TOL:
                raise InvalidArgumentError(f"|{label}| must not exceed 1, got {abs(value)}")
            object.__setattr__(self, label, value)

    @classmethod
    def cross_pol(cls, xi: complex) -> "Impairment":
        """Symmetric leakage xi between the two branches."""
        return cls("cross_pol", xi, xi, 1.0)

    @classmethod
    def unbalanced(cls, xi: complex) -> "Impairment":
        """Complex gain xi on the second branch."""
        return cls("unbalanced", 0.0, 0.0, xi)

    @classmethod
    def generic(cls, a: complex, b: complex, c: complex) -> "Impairment":
        return cls("generic", a, b, c)

    @property
    def xi(self) -> complex:
        return self.c if self.kind == "unbalanced" else self.a

    def jones(self) -> np.ndarray:
        return np.array([[1.0, self.a], [self.b, self.c]], dtype=complex)

    def mueller(self) -> np.ndarray:
        return impairment_mueller(self.a, self.b, self.c)


@dataclass(frozen=True, eq=False)
class ChannelConfig:
    """
    Link parameters of one experiment point.

    Attributes:
        snr_db: gamma = P_x / sigma_w^2 in dB; +inf means noiseless
        channel: Known 2x2 channel matrix
        impairment: Optional polarization impairment before the channel
    """

    snr_db: float
    channel: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))
    impairment: Optional[Impairment] = None

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise InvalidArgumentError(f"snr_db must be a number or +inf, got {self.snr_db}")
        h = as_finite(self.channel, complex, (2, 2), "channel")
        if h.ndim != 2 or abs(np.linalg.det(h)) <= Config.ALGEBRAIC_TOL:
            raise InvalidArgumentError("channel must be an invertible 2x2 matrix")
        object.__setattr__(self, "channel", h)

    @property
    def sigma_w2(self) -> float:
        """Noise variance per complex polarization component."""
        if self.snr_db == math.inf:
            return 0.0
        return P_X / 10.0 ** (self.snr_db / 10.0)


def awgn(e, sigma_w2: float, rng: np.random.Generator) -> np.ndarray:
    """
    Add circularly-symmetric complex Gaussian noise.

    Args:
        e: Complex Jones vectors (..., 2)
        sigma_w2: Variance per complex component
        rng: Random generator

    Returns:
        Noisy copy of e

    Raises:
        InvalidArgumentError: If sigma_w2 is negative
    """
    if not sigma_w2 >= 0:
        raise InvalidArgumentError(f"noise variance must be >= 0, got {sigma_w2}")
    e = as_finite(e, complex, (2,), "Jones vector")
    if sigma_w2 == 0:
        return e.copy()
    scale = math.sqrt(sigma_w2 / 2.0)
    noise = rng.standard_normal(e.shape) + 1j * rng.standard_normal(e.shape)
    return e + scale * noise


@dataclass(frozen=True)
class StokesMoments:
    """Per-parameter means and variances of the detected Stokes vector."""

    mean: Tuple[float, float, float, float]
    variance: Tuple[float, float, float, float]

    def __post_init__(self):
        if any(v < 0 for v in self.variance):
            raise InvalidArgumentError(f"variances must be non-negative, got {self.variance}")


def predicted_stokes_moments(p_x: float, sigma_w2: float) -> StokesMoments:
    """
    Moments of the detected Stokes vector for equal-power branches.

    Args:
        p_x: Signal power per polarization
        sigma_w2: Noise variance per polarization

    Returns:
        StokesMoments
    """
    if p_x < 0 or sigma_w2 < 0:
        raise InvalidArgumentError("powers must be non-negative")
    side = 4.0 * p_x * sigma_w2 + 2.0 * sigma_w2 ** 2
    cross = 2.0 * (p_x + sigma_w2) ** 2
    return StokesMoments(
        mean=(2.0 * (p_x + sigma_w2), 0.0, 0.0, 0.0),
        variance=(side, side, cross, cross),
    )


def _constant_modulus(p_x: float, n: int, rng: np.random.Generator) -> np.ndarray:
    phases = rng.uniform(0.0, 2.0 * math.pi, size=(n, 2))
    return math.sqrt(p_x) * np.exp(1j * phases)


def simulate_stokes_moments(p_x: float, sigma_w2: float, n: int,
                            rng: np.random.Generator) -> StokesMoments:
    """Sample moments of noisy constant-modulus symbols with independent uniform phases."""
    if n < 2:
        raise InvalidArgumentError(f"need at least 2 samples, got {n}")
    s = jones_to_stokes(awgn(_constant_modulus(p_x, n, rng), sigma_w2, rng))
    return StokesMoments(
        mean=tuple(float(v) for v in s.mean(axis=0)),
        variance=tuple(float(v) for v in s.var(axis=0)),
    )


def stokes_snr(gamma) -> np.ndarray:
    """
    Per-parameter SNR after square-law detection.

    Args:
        gamma: Input SNR P_x / sigma_w^2 (linear), scalar or array

    Returns:
        Array (..., 4): (g/(1+1.5/g), 0, g/(2+1/g), g/(2+1/g)); zeros where g = 0
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0) or not np.all(np.isfinite(g)):
        raise InvalidArgumentError("gamma must be finite and non-negative")
    safe = np.where(g > 0, g, 1.0)
    s0 = np.where(g > 0, g / (1.0 + 1.5 / safe), 0.0)
    s2 = np.where(g > 0, g / (2.0 + 1.0 / safe), 0.0)
    return np.stack([s0, np.zeros_like(g), s2, s2], axis=-1)


def simulate_stokes_snr(gamma: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Signal-to-noise power ratio of each Stokes parameter, by simulation."""
    if not 0 < gamma < math.inf:
        raise InvalidArgumentError(f"gamma must be positive and finite, got {gamma}")
    clean = _constant_modulus(P_X, n, rng)
    noisy = awgn(clean, P_X / gamma, rng)
    s_clean = jones_to_stokes(clean)
    s_noisy = jones_to_stokes(noisy)
    signal = np.mean(s_clean ** 2, axis=0)
    noise = np.mean((s_noisy - s_clean) ** 2, axis=0)
    return signal / noise


def impairment_mueller(a: complex, b: complex, c: complex) -> np.ndarray:
    """
    Mueller matrix of the impairment Jones matrix [[1, a], [b, c]].

    Raises:
        InvalidArgumentError: If a magnitude exceeds 1
        InternalConsistencyError: If it disagrees with the Jones route
    """
    imp = Impairment.generic(a, b, c)
    a, b, c = imp.a, imp.b, imp.c
    aa, bb, cc = abs(a) ** 2, abs(b) ** 2, abs(c) ** 2
    ac = a * c.conjugate()
    ab = a * b.conjugate()
    bc = b * c.conjugate()

    m = np.array([
        [0.5 * (1 + aa + bb + cc), 0.5 * (1 - aa + bb - cc), a.real + bc.real, -a.imag + bc.imag],
        [0.5 * (1 + aa - bb - cc), 0.5 * (1 - aa - bb + cc), a.real - bc.real, -a.imag - bc.imag],
        [b.real + ac.real, b.real - ac.real, c.real + ab.real, -ab.imag - c.imag],
        [b.imag - ac.imag, b.imag + ac.imag, c.imag - ab.imag, c.real - ab.real],
    ])

    if np.max(np.abs(m - jones_to_mueller(imp.jones()))) > Config.ALGEBRAIC_TOL:
        raise InternalConsistencyError("impairment Mueller matrix disagrees with the Jones route")
    return m


def global_mueller(mq, mk) -> np.ndarray:
    """M_G = M_Q M_K."""
    mq = as_finite(mq, float, (4, 4), "impairment Mueller matrix")
    mk = as_finite(mk, float, (4, 4), "pattern Mueller matrix")
    return mq @ mk


@dataclass(frozen=True)
class XiEstimate:
    """Estimator output; value is NaN when the radicand is negative."""

    value: float
    radicand: float
    in_range: bool


def estimate_xi(mg, mk) -> XiEstimate:
    """
    sqrt(1 - (M_G10/M_K11 + M_G20/M_K12 + M_G30/M_K13) / 3).

    Raises:
        InvalidArgumentError: If M_K11, M_K12 or M_K13 vanishes
    """
    mg = as_finite(mg, float, (4, 4), "global Mueller matrix")
    mk = as_finite(mk, float, (4, 4), "pattern Mueller matrix")
    denominators = mk[1, 1:4]
    if np.any(np.abs(denominators) < Config.ALGEBRAIC_TOL):
        raise InvalidArgumentError(f"estimator needs nonzero M_K11..M_K13, got {denominators}")

    radicand = float(1.0 - np.sum(mg[1:4, 0] / denominators) / 3.0)
    in_range = 0.0 <= radicand <= 1.0
    if not in_range:
        logger.warning(f"xi estimator radicand {radicand:.6g} outside [0, 1]")
    value = math.sqrt(radicand) if radicand >= 0 else math.nan
    return XiEstimate(value=value, radicand=radicand, in_range=in_range)


@dataclass(frozen=True)
class TrialOutcome:
    """Recovered bits of each receiver."""

    bits_legit: np.ndarray
    bits_eve: np.ndarray
    bits_eve_wrong: Optional[np.ndarray] = None


def transmit(ctx: CipherContext, cfg: ChannelConfig, bits, rng: np.random.Generator) -> np.ndarray:
    """Cipherfield after impairment, channel and noise."""
    e = encrypt(ctx, bits)
    if cfg.impairment is not None:
        e = e @ cfg.impairment.jones().T
    e = e @ cfg.channel.T
    return awgn(e, cfg.sigma_w2, rng)


def run_trial(ctx: CipherContext, cfg: ChannelConfig, bits, rng: np.random.Generator,
              eve_ctx: CipherContext = None) -> TrialOutcome:
    """
    Send one block and decode it at every receiver.

    Args:
        ctx: Legitimate cipher context
        cfg: Channel configuration
        bits: Bit block
        rng: Stream for the noise
        eve_ctx: Optional wrong-pattern context for a guessing eavesdropper

    Returns:
        TrialOutcome
    """
    y = transmit(ctx, cfg, bits, rng)
    legit = decrypt(ctx, y, cfg.channel)
    eve = decrypt(ctx, y, cfg.channel, as_eavesdropper=True)
    wrong = decrypt(eve_ctx, y, cfg.channel) if eve_ctx is not None else None
    return TrialOutcome(bits_legit=legit, bits_eve=eve, bits_eve_wrong=wrong)


def impairment_distortion(ctx: CipherContext, impairment: Optional[Impairment]) -> float:
    """
    Noiseless mean squared displacement of the recovered reduced Stokes vectors.

    Each constellation point is obfuscated, impaired, de-obfuscated and
    renormalized to S0 = 1 before comparison.
    """
    s = ctx.constellation.symbols
    recovered = s @ ctx.mueller.T
    if impairment is not None:
        recovered = recovered @ impairment.mueller().T
    recovered = recovered @ ctx.mueller_inverse.T
    u = recovered[:, 1:] / recovered[:, :1]
    return float(np.mean(np.sum((u - s[:, 1:]) ** 2, axis=1)))


def post_impairment_snr_db(
    constellation: SphereConstellation,
    impairment: Optional[Impairment],
    snr_db: float,
    *,
    scheme=Scheme.GOLDEN,
    trials: int = 200,
    symbols_per_trial: int = 64,
    seed: int = 0,
    stream_key: Tuple[int, ...] = (),
) -> float:
    """
    Legitimate-receiver SNR of the normalized reduced Stokes vector, in dB.

    Trial t draws its pattern, symbols and noise from stream
    (seed, *stream_key, t); the impairment does not consume randomness, so
    a sweep over impairments with one seed uses common random numbers.

    Returns:
        -10 log10 E|u - S|^2 with u the recovered normalized vector
    """
    if trials < 1 or symbols_per_trial < 1:
        raise InvalidArgumentError("trials and symbols_per_trial must be positive")
    sigma_w2 = ChannelConfig(snr_db=snr_db).sigma_w2
    q = impairment.jones() if impairment is not None else None

    total, count = 0.0, 0
    for t in range(trials):
        rng = stream(seed, *stream_key, t)
        ctx = CipherContext.from_pattern(random_pattern(scheme, rng), constellation)
        plain = map_labels(constellation, rng.integers(0, constellation.size, symbols_per_trial))
        e = stokes_to_jones(plain @ ctx.mueller.T)
        if q is not None:
            e = e @ q.T
        recovered = jones_to_stokes(awgn(e, sigma_w2, rng)) @ ctx.mueller_inverse.T
        u = recovered[:, 1:] / recovered[:, :1]
        total += float(np.sum((u - plain[:, 1:]) ** 2))
        count += symbols_per_trial

    mse = total / count
    return math.inf if mse == 0 else -10.0 * math.log10(mse)
