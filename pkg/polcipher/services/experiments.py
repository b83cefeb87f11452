"""
Experiment families: configuration, sharded Monte-Carlo execution and result records.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import beta

from polcipher.config import Config
from polcipher.services.channel import (
    P_X,
    ChannelConfig,
    Impairment,
    post_impairment_snr_db,
    predicted_stokes_moments,
    run_trial,
    simulate_stokes_moments,
    simulate_stokes_snr,
    stokes_snr,
)
from polcipher.services.constellation import SUPPORTED_SIZES, build_constellation
from polcipher.services.encipherment import (
    CipherContext,
    Scheme,
    pattern_mueller,
    random_pattern,
)
from polcipher.services.metrics import (
    amount_of_transformation,
    q_bounds,
    rotation_q_curve,
    transformation_report,
)
from polcipher.services.mueller import jones_to_mueller, random_jones
from polcipher.utils.exceptions import ExperimentConfigError, InvalidArgumentError
from polcipher.utils.logger import setup_logger
from polcipher.utils.rng import stream

logger = setup_logger("experiments")

IMPAIRMENT_KINDS = ("cross_pol", "unbalanced")
# Default far end of the xi grid per impairment kind; the near end is the ideal value
XI_DEFAULTS = {"cross_pol": (0.0, 0.9), "unbalanced": (1.0, 0.1)}


class ExperimentKind(str, Enum):
    """Experiment families."""

    BER_SWEEP = "ber_sweep"
    ROTATION_SWEEP = "rotation_sweep"
    Q_VS_TRACE = "q_vs_trace"
    STOKES_STATS = "stokes_stats"
    SNR_TRANSFORM = "snr_transform"
    IMPERFECTION_SWEEP = "imperfection_sweep"
    VALIDATE = "validate"


@dataclass(frozen=True)
class ResultRecord:
    """One row of an experiment result file."""

    experiment: str
    scheme: str
    m: int
    snr_db: Optional[float]
    parameter: Optional[float]
    role: str
    errors: int = 0
    bits: int = 0
    ber: float = 0.0
    aux: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.errors < 0 or self.bits < 0 or self.errors > self.bits:
            raise InvalidArgumentError(
                f"inconsistent counts: {self.errors} errors over {self.bits} bits"
            )
        if not 0.0 <= self.ber <= 1.0:
            raise InvalidArgumentError(f"ber must lie in [0, 1], got {self.ber}")


def counted_record(experiment: str, scheme: str, m: int, snr_db, parameter, role: str,
                   errors: int, bits: int, aux: Sequence[Tuple[str, float]] = ()) -> ResultRecord:
    """Record with ber and its Clopper-Pearson interval filled in."""
    low, high = clopper_pearson(errors, bits)
    return ResultRecord(
        experiment=experiment,
        scheme=scheme,
        m=m,
        snr_db=snr_db,
        parameter=parameter,
        role=role,
        errors=int(errors),
        bits=int(bits),
        ber=errors / bits if bits else 0.0,
        aux=(("ci_low", low), ("ci_high", high), *aux),
    )


def clopper_pearson(errors: int, bits: int, confidence: float = None) -> Tuple[float, float]:
    """Exact binomial confidence interval for errors/bits."""
    confidence = Config.CONFIDENCE if confidence is None else confidence
    if bits == 0:
        return 0.0, 1.0
    alpha = 1.0 - confidence
    low = float(beta.ppf(alpha / 2, errors, bits - errors + 1)) if errors > 0 else 0.0
    high = float(beta.ppf(1 - alpha / 2, errors + 1, bits - errors)) if errors < bits else 1.0
    return low, high


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Complete description of one experiment run.

    theta_range is (start, stop, steps) with stop excluded; xi_grid lists the
    impairment values of an imperfection sweep in order.
    """

    kind: ExperimentKind
    scheme: Scheme = Scheme.GOLDEN
    m: int = Config.DEFAULT_M
    snr_db_range: Tuple[float, float, float] = (
        Config.DEFAULT_SNR_START, Config.DEFAULT_SNR_STOP, Config.DEFAULT_SNR_STEP)
    trials: int = Config.DEFAULT_TRIALS
    block_bits: int = Config.DEFAULT_BLOCK_BITS
    theta: Optional[float] = None
    theta_range: Optional[Tuple[float, float, int]] = None
    secure_band: bool = False
    impairment: Optional[str] = None
    xi_grid: Optional[Tuple[complex, ...]] = None
    samples: int = Config.DEFAULT_SAMPLES
    eve_wrong: bool = False
    baseline: bool = True
    seed: int = Config.DEFAULT_SEED
    out_path: str = "results.csv"
    plot_path: Optional[str] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ExperimentKind(self.kind))
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        except ValueError as e:
            raise ExperimentConfigError(str(e)) from e

        start, stop, step = self.snr_db_range
        # +inf is allowed only as a single noiseless point
        noiseless = start == stop == math.inf
        finite = math.isfinite(start) and math.isfinite(stop)
        if not (finite or noiseless) or step <= 0 or stop < start:
            raise ExperimentConfigError(
                f"SNR range must be finite and non-empty, got {self.snr_db_range}"
            )
        if self.m not in SUPPORTED_SIZES:
            raise ExperimentConfigError(f"m must be one of {SUPPORTED_SIZES}, got {self.m}")
        if self.trials < 1 or self.block_bits < 1 or self.samples < 1:
            raise ExperimentConfigError("trials, block_bits and samples must be >= 1")
        if noiseless and self.kind is ExperimentKind.SNR_TRANSFORM:
            raise ExperimentConfigError("snr_transform needs a finite SNR")
        if self.seed < 0:
            raise ExperimentConfigError(f"seed must be non-negative, got {self.seed}")

        rotation_kinds = (ExperimentKind.ROTATION_SWEEP, ExperimentKind.Q_VS_TRACE)
        if self.kind is ExperimentKind.ROTATION_SWEEP and self.scheme is not Scheme.ROTATION:
            raise ExperimentConfigError("rotation_sweep requires scheme rotation")
        if (self.theta is not None or self.theta_range is not None or self.secure_band) \
                and self.scheme is not Scheme.ROTATION:
            raise ExperimentConfigError("theta options require scheme rotation")
        if self.theta_range is not None:
            if self.kind not in rotation_kinds:
                raise ExperimentConfigError(f"theta_range is not used by {self.kind.value}")
            t_start, t_stop, steps = self.theta_range
            if steps < 1 or t_stop <= t_start:
                raise ExperimentConfigError(f"theta range must be non-empty, got {self.theta_range}")
            if self.theta is not None:
                raise ExperimentConfigError("give either theta or a theta range, not both")

        if self.kind is ExperimentKind.IMPERFECTION_SWEEP:
            if self.impairment not in IMPAIRMENT_KINDS:
                raise ExperimentConfigError(
                    f"imperfection_sweep needs impairment in {IMPAIRMENT_KINDS}, got {self.impairment}"
                )
            if self.xi_grid is not None and len(self.xi_grid) == 0:
                raise ExperimentConfigError("xi grid must be non-empty")
        elif self.impairment is not None or self.xi_grid is not None:
            raise ExperimentConfigError(f"impairment options are not used by {self.kind.value}")

    def snr_points(self) -> np.ndarray:
        start, stop, step = self.snr_db_range
        if start == stop:
            return np.array([float(start)])
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return np.round(start + step * np.arange(count), 12)

    def theta_points(self) -> np.ndarray:
        if self.theta is not None and self.theta_range is None:
            return np.array([float(self.theta)])
        t_start, t_stop, steps = self.theta_range or (0.0, 2 * math.pi, Config.DEFAULT_THETA_STEPS)
        return np.linspace(t_start, t_stop, int(steps), endpoint=False)

    def xi_points(self) -> Tuple[complex, ...]:
        if self.xi_grid is not None:
            return tuple(complex(x) for x in self.xi_grid)
        near, far = XI_DEFAULTS[self.impairment]
        return tuple(complex(x) for x in np.linspace(near, far, Config.DEFAULT_XI_STEPS))

    def make_impairment(self, xi: complex) -> Impairment:
        if self.impairment == "cross_pol":
            return Impairment.cross_pol(xi)
        return Impairment.unbalanced(xi)


# -- configuration files -------------------------------------------------------

def _parse_bool(raw: str) -> bool:
    value = str(raw).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


CONFIG_KEYS: Dict[str, Callable[[str], object]] = {
    "scheme": str,
    "m": int,
    "snr_start": float,
    "snr_stop": float,
    "snr_step": float,
    "trials": int,
    "block_bits": int,
    "theta": float,
    "theta_start": float,
    "theta_stop": float,
    "theta_steps": int,
    "secure_band": _parse_bool,
    "impairment": str,
    "xi_re": float,
    "xi_im": float,
    "xi_steps": int,
    "samples": int,
    "eve_wrong": _parse_bool,
    "baseline": _parse_bool,
    "seed": int,
    "out": str,
    "plot": str,
}


def load_config_file(path) -> Dict[str, str]:
    """
    Read a ``key = value`` experiment file; ``#`` starts a comment.

    Raises:
        ExperimentConfigError: If the file is unreadable or a line is malformed
    """
    path = Path(path)
    values: Dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise ExperimentConfigError(f"Cannot read config file {path}: {e}") from e

    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ExperimentConfigError(f"{path}:{number}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ExperimentConfigError(f"{path}:{number}: unknown key {key!r}")
        values[key] = value
    return values


def resolve_config(kind, file_values: Mapping[str, object] = None,
                   overrides: Mapping[str, object] = None) -> ExperimentConfig:
    """
    Merge defaults, file values and command-line overrides (flags win).

    Args:
        kind: Experiment kind
        file_values: Raw values from ``load_config_file``
        overrides: Parsed flag values; None entries are ignored

    Returns:
        Validated ExperimentConfig

    Raises:
        ExperimentConfigError: On unknown keys, bad values or invalid combinations
    """
    merged: Dict[str, object] = {}
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key not in CONFIG_KEYS:
                raise ExperimentConfigError(f"unknown configuration key {key!r}")
            try:
                merged[key] = CONFIG_KEYS[key](value) if isinstance(value, str) else value
            except ValueError as e:
                raise ExperimentConfigError(f"bad value for {key}: {value!r}") from e

    kwargs: Dict[str, object] = {"kind": kind}
    for key, target in (("scheme", "scheme"), ("m", "m"), ("trials", "trials"),
                        ("block_bits", "block_bits"), ("theta", "theta"),
                        ("secure_band", "secure_band"), ("impairment", "impairment"),
                        ("samples", "samples"), ("eve_wrong", "eve_wrong"),
                        ("baseline", "baseline"), ("seed", "seed"), ("out", "out_path"),
                        ("plot", "plot_path")):
        if key in merged:
            kwargs[target] = merged[key]

    snr_start = float(merged.get("snr_start", Config.DEFAULT_SNR_START))
    snr_stop = float(merged.get("snr_stop", Config.DEFAULT_SNR_STOP))
    if "snr_stop" not in merged:
        # a lone start above the default stop means a single point
        snr_stop = max(snr_start, snr_stop)
    kwargs["snr_db_range"] = (snr_start, snr_stop, float(merged.get("snr_step", Config.DEFAULT_SNR_STEP)))

    if any(k in merged for k in ("theta_start", "theta_stop", "theta_steps")):
        kwargs["theta_range"] = (
            float(merged.get("theta_start", 0.0)),
            float(merged.get("theta_stop", 2 * math.pi)),
            int(merged.get("theta_steps", Config.DEFAULT_THETA_STEPS)),
        )

    if any(k in merged for k in ("xi_re", "xi_im", "xi_steps")):
        impairment = merged.get("impairment")
        if impairment not in XI_DEFAULTS:
            raise ExperimentConfigError("xi options need impairment cross_pol or unbalanced")
        near, far = XI_DEFAULTS[impairment]
        end = complex(float(merged.get("xi_re", far)), float(merged.get("xi_im", 0.0)))
        steps = int(merged.get("xi_steps", Config.DEFAULT_XI_STEPS))
        if steps < 1:
            raise ExperimentConfigError(f"xi_steps must be >= 1, got {steps}")
        kwargs["xi_grid"] = tuple(
            complex(near + (end - near) * t) for t in np.linspace(0.0, 1.0, steps)
        )

    return ExperimentConfig(**kwargs)


# -- link-level work units -----------------------------------------------------

@dataclass(frozen=True)
class LinkTask:
    """A contiguous range of trials at one experiment point."""

    scheme: Scheme
    m: int
    snr_db: float
    block_bits: int
    seed: int
    stream_index: int
    trial_start: int
    trial_stop: int
    theta: Optional[float] = None
    secure_band: bool = False
    impairment: Optional[Impairment] = None
    eve_wrong: bool = False


def run_link_task(task: LinkTask) -> Dict[str, Tuple[int, int]]:
    """
    Error counts per receiver role over the task's trials.

    Trial t uses stream (seed, stream_index, t) for its pattern, bits and noise.
    """
    constellation = build_constellation(task.m)
    k = constellation.bits_per_symbol
    padded_bits = -(-task.block_bits // k) * k
    cfg = ChannelConfig(snr_db=task.snr_db, impairment=task.impairment)

    counts = {"legit": 0, "eve": 0}
    if task.eve_wrong:
        counts["eve_wrong"] = 0

    for t in range(task.trial_start, task.trial_stop):
        rng = stream(task.seed, task.stream_index, t)
        pattern = random_pattern(task.scheme, rng, theta=task.theta, secure_band=task.secure_band)
        ctx = CipherContext.from_pattern(pattern, constellation)
        wrong = None
        if task.eve_wrong:
            guess = random_pattern(task.scheme, rng, theta=task.theta, secure_band=task.secure_band)
            wrong = CipherContext.from_pattern(guess, constellation)

        bits = rng.integers(0, 2, task.block_bits, dtype=np.int8)
        block = np.zeros(padded_bits, dtype=np.int8)
        block[:task.block_bits] = bits
        outcome = run_trial(ctx, cfg, block, rng, eve_ctx=wrong)

        counts["legit"] += int(np.count_nonzero(outcome.bits_legit[:task.block_bits] != bits))
        counts["eve"] += int(np.count_nonzero(outcome.bits_eve[:task.block_bits] != bits))
        if wrong is not None:
            counts["eve_wrong"] += int(
                np.count_nonzero(outcome.bits_eve_wrong[:task.block_bits] != bits)
            )

    n_bits = (task.trial_stop - task.trial_start) * task.block_bits
    return {role: (errors, n_bits) for role, errors in counts.items()}


class ExperimentRunner:
    """Service that executes experiment configurations."""

    def __init__(self, workers: int = None):
        """
        Initialize the runner.

        Args:
            workers: Process count; defaults to POLCIPHER_WORKERS
        """
        self.workers = Config.WORKERS if workers is None else max(1, int(workers))
        logger.info(f"Experiment runner initialized with {self.workers} worker(s)")

    def run(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        """
        Run one experiment.

        Args:
            cfg: Experiment configuration

        Returns:
            Records in configuration order
        """
        handlers = {
            ExperimentKind.BER_SWEEP: self._ber_sweep,
            ExperimentKind.ROTATION_SWEEP: self._rotation_sweep,
            ExperimentKind.IMPERFECTION_SWEEP: self._imperfection_sweep,
            ExperimentKind.Q_VS_TRACE: self._q_vs_trace,
            ExperimentKind.STOKES_STATS: self._stokes_stats,
            ExperimentKind.SNR_TRANSFORM: self._snr_transform,
            ExperimentKind.VALIDATE: self._validate,
        }
        logger.info(f"Starting {cfg.kind.value} (scheme={cfg.scheme.value}, m={cfg.m}, seed={cfg.seed})")
        records = handlers[cfg.kind](cfg)
        logger.info(f"Finished {cfg.kind.value}: {len(records)} records")
        return records

    def _map(self, fn, tasks: List) -> List:
        if self.workers <= 1 or len(tasks) <= 1:
            return [fn(task) for task in tasks]
        with ProcessPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(fn, tasks))

    def _link_points(self, cfg: ExperimentConfig, points: List[dict]) -> List[Dict[str, Tuple[int, int]]]:
        """Shard every point into trial ranges, run them and sum per point."""
        tasks, owners = [], []
        for index, point in enumerate(points):
            for start in range(0, cfg.trials, Config.TRIAL_SHARD):
                tasks.append(LinkTask(
                    m=cfg.m,
                    block_bits=cfg.block_bits,
                    seed=cfg.seed,
                    trial_start=start,
                    trial_stop=min(cfg.trials, start + Config.TRIAL_SHARD),
                    **point,
                ))
                owners.append(index)

        totals: List[Dict[str, Tuple[int, int]]] = [{} for _ in points]
        for owner, result in zip(owners, self._map(run_link_task, tasks)):
            for role, (errors, bits) in result.items():
                old_errors, old_bits = totals[owner].get(role, (0, 0))
                totals[owner][role] = (old_errors + errors, old_bits + bits)
        return totals

    def _ber_sweep(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        snrs = cfg.snr_points()
        schemes = [cfg.scheme]
        if cfg.baseline and cfg.scheme is not Scheme.NONE:
            schemes.append(Scheme.NONE)

        points = []
        for scheme in schemes:
            for si, snr in enumerate(snrs):
                points.append(dict(
                    scheme=scheme,
                    snr_db=float(snr),
                    stream_index=si,
                    theta=cfg.theta if scheme is Scheme.ROTATION else None,
                    secure_band=cfg.secure_band and scheme is Scheme.ROTATION,
                    eve_wrong=cfg.eve_wrong and scheme is not Scheme.NONE,
                ))

        records = []
        for point, totals in zip(points, self._link_points(cfg, points)):
            for role, (errors, bits) in totals.items():
                if point["scheme"] is Scheme.NONE and role != "legit":
                    continue
                records.append(counted_record(
                    cfg.kind.value, point["scheme"].value, cfg.m, point["snr_db"],
                    cfg.theta if point["scheme"] is Scheme.ROTATION else None,
                    role, errors, bits,
                ))
        return records

    def _rotation_sweep(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        points, params = [], []
        for si, snr in enumerate(cfg.snr_points()):
            for theta in cfg.theta_points():
                points.append(dict(
                    scheme=Scheme.ROTATION, snr_db=float(snr), stream_index=si,
                    theta=float(theta), eve_wrong=cfg.eve_wrong,
                ))
                params.append((float(snr), float(theta)))
            if cfg.baseline:
                points.append(dict(scheme=Scheme.NONE, snr_db=float(snr), stream_index=si))
                params.append((float(snr), None))

        records = []
        for (snr, theta), point, totals in zip(params, points, self._link_points(cfg, points)):
            for role, (errors, bits) in totals.items():
                if point["scheme"] is Scheme.NONE and role != "legit":
                    continue
                aux = ()
                if theta is not None:
                    aux = (("q", float(rotation_q_curve(theta)[0])),)
                records.append(counted_record(
                    cfg.kind.value, point["scheme"].value, cfg.m, snr, theta, role,
                    errors, bits, aux,
                ))
        return records

    def _imperfection_sweep(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        constellation = build_constellation(cfg.m)
        symbols = max(1, cfg.block_bits // constellation.bits_per_symbol)
        xis = cfg.xi_points()

        points = []
        for si, snr in enumerate(cfg.snr_points()):
            for xi in xis:
                points.append(dict(
                    scheme=cfg.scheme, snr_db=float(snr), stream_index=si,
                    impairment=cfg.make_impairment(xi), eve_wrong=cfg.eve_wrong,
                ))
        totals_list = self._link_points(cfg, points)

        records = []
        for si, snr in enumerate(cfg.snr_points()):
            post = dict(scheme=cfg.scheme, trials=cfg.trials, symbols_per_trial=symbols,
                        seed=cfg.seed, stream_key=(si, 1))
            ideal = post_impairment_snr_db(constellation, None, float(snr), **post)
            for xi_index, xi in enumerate(xis):
                point_index = si * len(xis) + xi_index
                impaired = post_impairment_snr_db(
                    constellation, points[point_index]["impairment"], float(snr), **post)
                logger.debug(f"xi={xi}: post-impairment SNR {impaired:.3f} dB (ideal {ideal:.3f})")
                for role, (errors, bits) in totals_list[point_index].items():
                    aux = [("xi_im", xi.imag)]
                    if role == "legit":
                        aux += [("snr_post_db", impaired), ("degradation_db", ideal - impaired)]
                    records.append(counted_record(
                        cfg.kind.value, cfg.scheme.value, cfg.m, float(snr), xi.real, role,
                        errors, bits, aux,
                    ))
        return records

    def _q_vs_trace(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        rng = stream(cfg.seed, 0)
        kind = cfg.kind.value
        records = []

        if cfg.scheme is Scheme.NONE:
            muellers = jones_to_mueller(random_jones(rng, cfg.samples))
            qs = amount_of_transformation(muellers)
            for m, q in zip(muellers, np.atleast_1d(qs)):
                lower, upper = q_bounds(m)
                records.append(ResultRecord(
                    kind, cfg.scheme.value, cfg.m, None, float(np.trace(m)), "none",
                    aux=(("q", float(q)), ("q_lower", lower), ("q_upper", upper)),
                ))
            return records

        constellation = build_constellation(cfg.m)
        if cfg.scheme is Scheme.ROTATION:
            mc = cfg.samples if cfg.samples >= 1000 else None
            for index, theta in enumerate(cfg.theta_points()):
                pattern = random_pattern(Scheme.ROTATION, rng, theta=float(theta))
                report = transformation_report(pattern_mueller(pattern), constellation,
                                               mc_samples=mc, seed=cfg.seed + index)
                aux = [("q", report.q_closed), ("q_lower", report.q_lower),
                       ("q_upper", report.q_upper), ("p_avg", report.p_avg)]
                if report.q_mc is not None:
                    aux += [("q_mc", report.q_mc), ("q_mc_se", report.q_mc_se)]
                records.append(ResultRecord(kind, cfg.scheme.value, cfg.m, None,
                                            float(theta), "none", aux=tuple(aux)))
            return records

        for _ in range(cfg.samples):
            m = pattern_mueller(random_pattern(cfg.scheme, rng))
            report = transformation_report(m, constellation)
            records.append(ResultRecord(
                kind, cfg.scheme.value, cfg.m, None, float(np.trace(m)), "none",
                aux=(("q", report.q_closed), ("q_lower", report.q_lower),
                     ("q_upper", report.q_upper), ("p_avg", report.p_avg)),
            ))
        return records

    def _stokes_stats(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        records = []
        for index, snr in enumerate(cfg.snr_points()):
            # sigma_w2 is exactly 0 at the noiseless point
            sigma_w2 = ChannelConfig(snr_db=float(snr)).sigma_w2
            gamma = math.inf if sigma_w2 == 0 else P_X / sigma_w2
            simulated = simulate_stokes_moments(P_X, sigma_w2, cfg.samples, stream(cfg.seed, index))
            predicted = predicted_stokes_moments(P_X, sigma_w2)
            aux = [(f"mean{i}", simulated.mean[i]) for i in range(4)]
            aux += [(f"var{i}", simulated.variance[i]) for i in range(4)]
            aux += [(f"pred_mean{i}", predicted.mean[i]) for i in range(4)]
            aux += [(f"pred_var{i}", predicted.variance[i]) for i in range(4)]
            records.append(ResultRecord(cfg.kind.value, Scheme.NONE.value, cfg.m, float(snr),
                                        float(gamma), "none", aux=tuple(aux)))
        return records

    def _snr_transform(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        records = []
        for index, snr in enumerate(cfg.snr_points()):
            gamma = 10.0 ** (snr / 10.0)
            analytic = stokes_snr(gamma)
            simulated = simulate_stokes_snr(gamma, cfg.samples, stream(cfg.seed, index))
            aux = [(f"snr{i}", float(analytic[i])) for i in range(4)]
            aux += [(f"mc_snr{i}", float(simulated[i])) for i in range(4)]
            records.append(ResultRecord(cfg.kind.value, Scheme.NONE.value, cfg.m, float(snr),
                                        float(gamma), "none", aux=tuple(aux)))
        return records

    def _validate(self, cfg: ExperimentConfig) -> List[ResultRecord]:
        from polcipher.services.validation import run_checks

        records = []
        for index, check in enumerate(run_checks(seed=cfg.seed)):
            records.append(ResultRecord(
                f"{cfg.kind.value}/{check.name}", Scheme.NONE.value, cfg.m, None,
                float(index), "none",
                aux=(("passed", 1.0 if check.passed else 0.0), ("value", check.value),
                     ("threshold", check.threshold)),
            ))
        return records


def run_experiment(cfg: ExperimentConfig, workers: int = None) -> List[ResultRecord]:
    """Run an experiment with a fresh runner."""
    return ExperimentRunner(workers).run(cfg)
