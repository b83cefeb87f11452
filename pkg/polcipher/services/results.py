"""
Result artifacts: CSV files, plots and Jones-vector exchange files.
"""
import csv
from collections import OrderedDict
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from polcipher.config import Config  # noqa: E402
from polcipher.services.experiments import ExperimentKind, ResultRecord  # noqa: E402
from polcipher.utils.arrays import as_finite  # noqa: E402
from polcipher.utils.exceptions import InvalidArgumentError, ResultWriteError  # noqa: E402
from polcipher.utils.logger import setup_logger  # noqa: E402

logger = setup_logger("results")

BASE_COLUMNS = ["experiment", "scheme", "m", "snr_db", "parameter", "role", "errors", "bits", "ber"]


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    return Config.FLOAT_FORMAT % value


def _parse_optional(raw: str) -> Optional[float]:
    return None if raw == "" else float(raw)


def emit_csv(records: Sequence[ResultRecord], path) -> Path:
    """
    Write records as CSV (UTF-8, LF line endings, 17 significant digits).

    Args:
        records: Records in output order
        path: Target file

    Returns:
        Path written

    Raises:
        ResultWriteError: If the file cannot be written
    """
    path = Path(path)
    n_aux = max((len(r.aux) for r in records), default=0)
    header = list(BASE_COLUMNS)
    for i in range(1, n_aux + 1):
        header += [f"aux{i}_name", f"aux{i}"]

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for r in records:
                row = [r.experiment, r.scheme, str(r.m), _fmt(r.snr_db), _fmt(r.parameter),
                       r.role, str(r.errors), str(r.bits), _fmt(r.ber)]
                for name, value in r.aux:
                    row += [name, _fmt(value)]
                row += [""] * (len(header) - len(row))
                writer.writerow(row)
    except OSError as e:
        logger.error(f"Failed to write results to {path}: {e}", exc_info=True)
        raise ResultWriteError(f"Failed to write results to {path}: {e}") from e

    logger.info(f"Wrote {len(records)} records to {path}")
    return path


def read_csv(path) -> List[ResultRecord]:
    """
    Read a file written by ``emit_csv``.

    Raises:
        InvalidArgumentError: If the file is missing or malformed
    """
    path = Path(path)
    records = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or header[:len(BASE_COLUMNS)] != BASE_COLUMNS:
                raise InvalidArgumentError(f"{path}: not a result file")
            for row in reader:
                aux = []
                for i in range(len(BASE_COLUMNS), len(row) - 1, 2):
                    if row[i]:
                        aux.append((row[i], float(row[i + 1])))
                records.append(ResultRecord(
                    experiment=row[0],
                    scheme=row[1],
                    m=int(row[2]),
                    snr_db=_parse_optional(row[3]),
                    parameter=_parse_optional(row[4]),
                    role=row[5],
                    errors=int(row[6]),
                    bits=int(row[7]),
                    ber=float(row[8]),
                    aux=tuple(aux),
                ))
    except OSError as e:
        raise InvalidArgumentError(f"Cannot read result file {path}: {e}") from e
    except (IndexError, ValueError) as e:
        if isinstance(e, InvalidArgumentError):
            raise
        raise InvalidArgumentError(f"{path}: malformed row ({e})") from e
    return records


def _kind_of(record: ResultRecord) -> str:
    return record.experiment.split("/", 1)[0]


def _aux(record: ResultRecord, name: str) -> float:
    return dict(record.aux).get(name, np.nan)


def _curves(records: Iterable[ResultRecord], x_of, y_of):
    """Group (x, y) pairs by (scheme, role), keeping first-seen order."""
    groups = OrderedDict()
    for r in records:
        groups.setdefault((r.scheme, r.role), []).append((x_of(r), y_of(r)))
    return groups


def _plot_ber(ax, records, x_of, xlabel):
    for (scheme, role), pts in _curves(records, x_of, lambda r: r.ber).items():
        pts = [(x, y) for x, y in pts if y > 0]
        if pts:
            xs, ys = zip(*pts)
            ax.semilogy(xs, ys, marker="o", label=f"{scheme} / {role}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("BER")


def emit_plot(records: Sequence[ResultRecord], path) -> Path:
    """
    Render the records of one experiment kind as a static vector figure.

    Raises:
        InvalidArgumentError: If records are empty or mix experiment kinds
        ResultWriteError: If the figure cannot be written
    """
    if not records:
        raise InvalidArgumentError("no records to plot")
    kinds = {_kind_of(r) for r in records}
    if len(kinds) != 1:
        raise InvalidArgumentError(f"cannot plot mixed experiment kinds {sorted(kinds)}")
    kind = ExperimentKind(kinds.pop())
    path = Path(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    try:
        if kind is ExperimentKind.BER_SWEEP:
            _plot_ber(ax, records, lambda r: r.snr_db, "SNR (dB)")
        elif kind is ExperimentKind.ROTATION_SWEEP:
            rotated = [r for r in records if r.parameter is not None]
            _plot_ber(ax, rotated, lambda r: r.parameter, "theta (rad)")
            for r in records:
                if r.parameter is None:
                    ax.axhline(r.ber, linestyle="--", color="gray", label=f"baseline {r.snr_db:g} dB")
        elif kind is ExperimentKind.IMPERFECTION_SWEEP:
            legit = [r for r in records if r.role == "legit"]
            for (scheme, _), pts in _curves(legit, lambda r: r.parameter,
                                            lambda r: _aux(r, "degradation_db")).items():
                xs, ys = zip(*pts)
                ax.plot(xs, ys, marker="o", label=scheme)
            ax.set_xlabel("Re xi")
            ax.set_ylabel("SNR degradation (dB)")
        elif kind is ExperimentKind.Q_VS_TRACE:
            xs = [r.parameter for r in records]
            ax.scatter(xs, [_aux(r, "q") for r in records], s=4, label="Q")
            ax.scatter(xs, [_aux(r, "q_lower") for r in records], s=2, label="lower bound")
            ax.scatter(xs, [_aux(r, "q_upper") for r in records], s=2, label="upper bound")
            ax.set_xlabel("tr(M)" if records[0].scheme != "rotation" else "theta (rad)")
            ax.set_ylabel("amount of transformation")
        elif kind is ExperimentKind.STOKES_STATS:
            xs = [r.snr_db for r in records]
            for i in range(4):
                line, = ax.plot(xs, [_aux(r, f"var{i}") for r in records], marker="o", label=f"var S{i}")
                ax.plot(xs, [_aux(r, f"pred_var{i}") for r in records], linestyle="--", color=line.get_color())
            ax.set_yscale("log")
            ax.set_xlabel("SNR (dB)")
            ax.set_ylabel("variance")
        elif kind is ExperimentKind.SNR_TRANSFORM:
            xs = [r.snr_db for r in records]
            for i in (0, 2):
                line, = ax.plot(xs, [_aux(r, f"snr{i}") for r in records], label=f"SNR S{i}")
                ax.plot(xs, [_aux(r, f"mc_snr{i}") for r in records], "o", color=line.get_color())
            ax.set_yscale("log")
            ax.set_xlabel("input SNR (dB)")
            ax.set_ylabel("output SNR")
        else:
            names = [r.experiment.split("/", 1)[-1] for r in records]
            ax.barh(names, [_aux(r, "passed") for r in records])
            ax.set_xlabel("passed")

        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize="small")
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()

        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format=Config.PLOT_FORMAT)
    except OSError as e:
        logger.error(f"Failed to write plot to {path}: {e}", exc_info=True)
        raise ResultWriteError(f"Failed to write plot to {path}: {e}") from e
    finally:
        plt.close(fig)

    logger.info(f"Wrote {kind.value} plot to {path}")
    return path


def write_jones_csv(jones, path) -> Path:
    """Write Jones vectors as ex_re,ex_im,ey_re,ey_im rows."""
    e = as_finite(jones, complex, (2,), "Jones vectors").reshape(-1, 2)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["ex_re", "ex_im", "ey_re", "ey_im"])
            for ex, ey in e:
                writer.writerow([_fmt(ex.real), _fmt(ex.imag), _fmt(ey.real), _fmt(ey.imag)])
    except OSError as e_:
        raise ResultWriteError(f"Failed to write Jones vectors to {path}: {e_}") from e_
    return path


def read_jones_csv(path) -> np.ndarray:
    """
    Read Jones vectors written by ``write_jones_csv``.

    Raises:
        InvalidArgumentError: If the file is missing or malformed
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise InvalidArgumentError(f"Cannot read Jones file {path}: {e}") from e
    if not rows or rows[0] != ["ex_re", "ex_im", "ey_re", "ey_im"]:
        raise InvalidArgumentError(f"{path}: not a Jones vector file")
    try:
        values = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
    except ValueError as e:
        raise InvalidArgumentError(f"{path}: malformed number ({e})") from e
    if values.size == 0:
        return np.zeros((0, 2), dtype=complex)
    if values.shape[1] != 4:
        raise InvalidArgumentError(f"{path}: expected 4 columns")
    return values[:, 0::2] + 1j * values[:, 1::2]
